"""Classical unconstraining baselines: EM, PD, their Daily variants, DES,
and mean imputation.

EM and PD treat the observations as draws from a single normal population and
iterate an E-step (replace each censored value with a conditional statistic
of the upper tail above its limit) and an M-step (refit mu, sigma).  The
Daily variants run the same machinery day by day across a set of curves; DES
extrapolates the cumulative series with Holt's linear-trend smoothing.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfcx, log_ndtr, ndtri_exp

from .errors import DegenerateSpread, NoReferenceCurves, ShapeMismatch

__all__ = [
    "UnorderedTask",
    "SeriesTask",
    "UnconstrainOutput",
    "em",
    "pd",
    "em_daily",
    "pd_daily",
    "des",
    "mean_impute",
]

EM_TOL = 1e-4
EM_MAX_ITER = 500
_MIN_SPREAD = 1e-9


@dataclass(frozen=True)
class UnorderedTask:
    """Demand observations with a censoring mask and per-entry limits."""

    values: np.ndarray
    censored: np.ndarray
    limits: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, float)
        censored = np.asarray(self.censored, bool)
        limits = np.asarray(self.limits, float)
        if not (values.shape == censored.shape == limits.shape) or values.ndim != 1:
            raise ShapeMismatch("values, censored and limits must be equal-length vectors")
        if not np.array_equal(values[censored], limits[censored]):
            raise ValueError("censored entries must be observed at their limits")
        if censored.all():
            raise NoReferenceCurves("task has no uncensored observations")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "censored", censored)
        object.__setattr__(self, "limits", limits)


@dataclass(frozen=True)
class SeriesTask:
    """A cumulative booking prefix and the number of days to forecast."""

    cumulative: np.ndarray
    horizon: int

    def __post_init__(self):
        cum = np.asarray(self.cumulative, float)
        object.__setattr__(self, "cumulative", cum)
        if cum.ndim != 1 or len(cum) < 3:
            raise ValueError("cumulative needs at least 3 points")
        if np.any(np.diff(cum) < 0):
            raise ValueError("cumulative must be non-decreasing")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


@dataclass(frozen=True)
class UnconstrainOutput:
    """Unconstrained estimates for the censored entries (or the horizon)."""

    unconstrained: np.ndarray
    iterations: int
    converged: bool
    flag: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "unconstrained", np.asarray(self.unconstrained, float))


def _hazard(z):
    """phi(z) / (1 - Phi(z)), stable for both tails via erfcx."""
    return np.sqrt(2.0 / np.pi) / erfcx(z / np.sqrt(2.0))


def _em_estep(mu, sigma, limits):
    """Mean of N(mu, sigma) truncated below at each limit."""
    z = (limits - mu) / sigma
    return np.maximum(mu + sigma * _hazard(z), limits)


def _pd_estep(mu, sigma, limits, tau):
    """tau-quantile of the upper tail: q with P(X >= q) = tau P(X >= limit)."""
    z = (limits - mu) / sigma
    return np.maximum(mu - sigma * ndtri_exp(np.log(tau) + log_ndtr(-z)), limits)


def _iterate(task: UnorderedTask, estep, tol: float, max_iter: int) -> UnconstrainOutput:
    free = task.values[~task.censored]
    limits = task.limits[task.censored]
    if len(limits) == 0:
        return UnconstrainOutput(unconstrained=np.empty(0), iterations=0, converged=True)
    mu, sigma = free.mean(), free.std()
    if sigma < _MIN_SPREAD:
        warnings.warn(
            "uncensored spread is numerically zero; falling back to mean imputation",
            DegenerateSpread,
        )
        return UnconstrainOutput(
            unconstrained=np.maximum(limits, mu),
            iterations=0,
            converged=True,
            flag="degenerate_spread",
        )
    est = estep(mu, sigma, limits)
    converged = False
    n_iter = 1
    while n_iter < max_iter:
        combined = np.concatenate([free, est])
        mu, sigma = combined.mean(), max(combined.std(), 1e-12)
        new = estep(mu, sigma, limits)
        n_iter += 1
        delta = np.max(np.abs(new - est))
        est = new
        if delta < tol:
            converged = True
            break
    return UnconstrainOutput(unconstrained=est, iterations=n_iter, converged=converged)


def em(task: UnorderedTask, tol: float = EM_TOL, max_iter: int = EM_MAX_ITER) -> UnconstrainOutput:
    """Censored-normal EM: each censored value becomes the truncated-normal
    conditional mean above its limit; mu/sigma refit on uncensored + estimates
    (population sigma) until the estimates move less than tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _iterate(task, _em_estep, tol, max_iter)


def pd(task: UnorderedTask, tau: float = 0.5, tol: float = EM_TOL,
       max_iter: int = EM_MAX_ITER) -> UnconstrainOutput:
    """Projection detruncation: the EM skeleton with the conditional
    tau-quantile (tau=0.5: median of the tail above the limit) as E-step."""
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must be in (0, 1)")
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _iterate(task, lambda m, s, b: _pd_estep(m, s, b, tau), tol, max_iter)


def mean_impute(task: UnorderedTask) -> UnconstrainOutput:
    """Replace each censored value by max(limit, mean of uncensored)."""
    mu = task.values[~task.censored].mean()
    limits = task.limits[task.censored]
    return UnconstrainOutput(
        unconstrained=np.maximum(limits, mu), iterations=0, converged=True
    )


# ---------------------------------------------------------------------------
# daily variants


def _daily_variant(curves, estimator) -> list[UnconstrainOutput]:
    """Run an UnorderedTask estimator day-by-day across a set of curves.

    From the earliest day any curve is constrained through departure, each
    day's task takes the observed daily bookings of still-unconstrained
    curves as references and a censored-at-zero entry for each constrained
    curve; the per-day estimates accumulate onto each curve's prefix.
    """
    cfs = [c.constrained_from for c in curves]
    constrained_idx = [i for i, cf in enumerate(cfs) if cf is not None]
    horizon = len(curves[0].daily) if curves else 0
    daily_est = {i: [] for i in constrained_idx}
    if constrained_idx:
        t_max = min(cfs[i] for i in constrained_idx)
        for day in range(t_max, horizon):
            in_window = [i for i in constrained_idx if cfs[i] <= day]
            refs = [i for i in range(len(curves)) if cfs[i] is None or cfs[i] > day]
            if not refs:
                raise NoReferenceCurves("no unconstrained curve on day %d" % day)
            values = np.array([float(curves[i].daily[day]) for i in refs]
                              + [0.0] * len(in_window))
            censored = np.array([False] * len(refs) + [True] * len(in_window))
            limits = np.zeros(len(values))
            out = estimator(UnorderedTask(values=values, censored=censored, limits=limits))
            for j, i in enumerate(in_window):
                daily_est[i].append(out.unconstrained[j])
    results = []
    for i, curve in enumerate(curves):
        if cfs[i] is None:
            results.append(UnconstrainOutput(unconstrained=np.empty(0), iterations=0, converged=True))
        else:
            path = curve.prefix_total + np.cumsum(daily_est[i])
            results.append(UnconstrainOutput(unconstrained=path, iterations=0, converged=True))
    return results


def em_daily(curves) -> list[UnconstrainOutput]:
    """EM applied day-by-day; outputs cumulative paths over constrained days."""
    return _daily_variant(curves, em)


def pd_daily(curves, tau: float = 0.5) -> list[UnconstrainOutput]:
    """PD applied day-by-day; outputs cumulative paths over constrained days."""
    return _daily_variant(curves, lambda task: pd(task, tau=tau))


# ---------------------------------------------------------------------------
# double exponential smoothing (Holt's linear trend)

_DES_GRID = np.arange(1, 20) * 0.05  # 0.05 .. 0.95


def des(task: SeriesTask) -> UnconstrainOutput:
    """Holt's method on the cumulative series.

    Level/trend recursions l_t = a y_t + (1-a)(l_{t-1} + b_{t-1}) and
    b_t = B (l_t - l_{t-1}) + (1-B) b_{t-1}, initialized l_1 = y_1,
    b_1 = y_2 - y_1; (a, B) picked from {0.05,...,0.95}^2 by one-step-ahead
    in-sample squared error (first minimum wins).  The h-step forecast
    l_T + h b_T is clamped below by the last observed cumulative value.
    """
    y = task.cumulative
    alphas = np.repeat(_DES_GRID, len(_DES_GRID))
    betas = np.tile(_DES_GRID, len(_DES_GRID))
    level = np.full(alphas.shape, y[0])
    trend = np.full(alphas.shape, y[1] - y[0])
    sse = np.zeros(alphas.shape)
    for t in range(1, len(y)):
        pred = level + trend
        err = y[t] - pred
        sse += err * err
        new_level = alphas * y[t] + (1.0 - alphas) * pred
        trend = betas * (new_level - level) + (1.0 - betas) * trend
        level = new_level
    best = int(np.argmin(sse))
    steps = np.arange(1, task.horizon + 1)
    forecast = np.maximum(level[best] + steps * trend[best], y[-1])
    return UnconstrainOutput(unconstrained=forecast, iterations=0, converged=True)
