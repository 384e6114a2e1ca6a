"""Misclassification scoring with exhaustive label-bijection matching."""

from dataclasses import dataclass
from itertools import permutations
from statistics import mean, median

import numpy as np


class LengthMismatch(ValueError):
    """Predicted and ground-truth labelings have different lengths."""


@dataclass
class ScoreReport:
    misclassification: float
    best_permutation: dict    # predicted id -> true id
    confusion: np.ndarray     # (n, n), [predicted, true]


def misclassification(pred, truth):
    """Minimum error rate over all bijections between label sets.

    Brute force over permutations; the cluster count never exceeds a
    handful in this problem so exhaustive search stays exact and cheap.
    """
    if len(pred) != len(truth):
        raise LengthMismatch(
            f"predicted {len(pred)} labels, ground truth {len(truth)}")
    n = max(pred.n, truth.n)
    if n > 10:
        raise ValueError("bijection search supports at most 10 clusters")

    P = len(truth)
    confusion = np.zeros((n, n), dtype=int)
    np.add.at(confusion, (pred.labels, truth.labels), 1)

    best_correct, best_perm = -1, None
    for perm in permutations(range(n)):
        correct = sum(confusion[i, perm[i]] for i in range(n))
        if correct > best_correct:
            best_correct, best_perm = correct, perm
    return ScoreReport(1.0 - best_correct / P,
                       {i: best_perm[i] for i in range(n)},
                       confusion)


def aggregate(reports, group_keys=None):
    """Per-group mean and median misclassification in percent."""
    if not reports:
        raise ValueError("need at least one report")
    if group_keys is None:
        group_keys = ["all"] * len(reports)
    if len(group_keys) != len(reports):
        raise ValueError("one group key per report")

    groups = {}
    for key, report in zip(group_keys, reports):
        value = report.misclassification if isinstance(report, ScoreReport) else float(report)
        groups.setdefault(key, []).append(100.0 * value)
    return {key: {"mean": mean(vals), "median": median(vals), "count": len(vals)}
            for key, vals in groups.items()}


def format_table(aggregated):
    """Render the aggregate dict as an aligned text table."""
    lines = [f"{'group':<16}{'count':>6}{'mean %':>10}{'median %':>10}"]
    for key in sorted(aggregated, key=str):
        row = aggregated[key]
        lines.append(f"{str(key):<16}{row['count']:>6}"
                     f"{row['mean']:>10.2f}{row['median']:>10.2f}")
    return "\n".join(lines)
