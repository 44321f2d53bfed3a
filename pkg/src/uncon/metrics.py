"""Error measures for unconstraining experiments.

Three scores: e1 is the signed percentage error between mean estimated and
mean actual totals; e2 is the mean absolute distance between unconstrained
and actual cumulative curves over the constrained days; e3 is the mean
absolute error of final totals.  Ranking tables use |e1|; raw CSVs keep the
sign.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeMismatch

__all__ = ["ExperimentReport", "e1", "e2", "e3", "error_histogram"]


@dataclass(frozen=True)
class ExperimentReport:
    """Scores for one method on one experiment cell.

    ``e2`` is None for methods that produce totals only (no daily path).
    """

    method: str
    e1: float
    e2: float | None
    e3: float
    per_curve_e3: np.ndarray
    n_constrained: int
    seeds: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.e3 < 0:
            raise ValueError("e3 must be non-negative")
        if self.e2 is not None and self.e2 < 0:
            raise ValueError("e2 must be non-negative where present")
        object.__setattr__(self, "per_curve_e3", np.asarray(self.per_curve_e3, float))


def _paired(a, b, name):
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 1:
        raise ShapeMismatch("%s vectors must be equal-length and non-empty" % name)
    return a, b


def e1(dhat_totals, actual_totals) -> float:
    """Signed percentage error of the means: 100 (mean D-hat - mean A) / mean A."""
    dhat, actual = _paired(dhat_totals, actual_totals, "total")
    mean_actual = actual.mean()
    if mean_actual <= 0:
        raise ValueError("mean of actual totals must be positive")
    return float(100.0 * (dhat.mean() - mean_actual) / mean_actual)


def e2(uncon_cumulative, actual_cumulative) -> float:
    """Mean |unconstrained - actual| over all (curve, constrained-day) pairs.

    Both arguments are sequences of per-curve vectors covering exactly the
    constrained days of each curve.
    """
    if len(uncon_cumulative) != len(actual_cumulative):
        raise ShapeMismatch("curve counts differ")
    total = 0.0
    count = 0
    for u, a in zip(uncon_cumulative, actual_cumulative):
        u = np.asarray(u, float)
        a = np.asarray(a, float)
        if u.shape != a.shape:
            raise ShapeMismatch("per-curve day counts differ")
        total += np.abs(u - a).sum()
        count += u.size
    if count == 0:
        raise ShapeMismatch("no constrained days to score")
    return float(total / count)


def e3(uncon_totals, actual_totals) -> float:
    """Mean |unconstrained total - actual total| over constrained curves."""
    uncon, actual = _paired(uncon_totals, actual_totals, "total")
    return float(np.abs(uncon - actual).mean())


def error_histogram(per_curve_e3, bins: int):
    """Counts of per-curve errors in equal-width bins spanning [0, max].

    Bins are right-inclusive — edges e0..eB place a value v in bin i when
    e_i < v <= e_{i+1}, with v = 0 landing in the first bin — so the counts
    always sum to the number of values.  Returns ``(counts, edges)``.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    values = np.asarray(per_curve_e3, float)
    top = float(values.max()) if values.size else 0.0
    if top <= 0.0:
        top = 1.0
    edges = np.linspace(0.0, top, bins + 1)
    idx = np.clip(np.searchsorted(edges, values, side="left") - 1, 0, bins - 1)
    counts = np.bincount(idx, minlength=bins)
    return counts, edges
