"""Laplace-approximate GP regression for daily booking counts.

The latent demand function gets a GP prior with a (shifted) polynomial
covariance; observations are Poisson with a softplus link.  The posterior
mode is found by Newton iteration in the stabilized B-parametrization
(B = I + W^1/2 K W^1/2), hyperparameters are handled by quadrature over a
fixed grid with softmax marginal-likelihood weights rather than point
estimation.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
from scipy.special import logsumexp

from . import _backend
from .errors import (
    AllGridPointsFailed,
    NoConvergence,
    NumericalBreakdown,
    ShapeMismatch,
    SingularShift,
)
from .kernels import (
    DEFAULT_SHIFT,
    ChangepointKernelParams,
    CovMatrix,
    PolyKernelParams,
    apply_shift,
    build_cov,
)

__all__ = [
    "TrainingSet",
    "LaplaceFit",
    "PosteriorPredictive",
    "HyperGrid",
    "ChangepointGrid",
    "MarginalResult",
    "ChangepointMarginalResult",
    "find_mode",
    "log_marginal",
    "predict",
    "marginalize",
    "marginalize_changepoint",
]

GRAD_TOL = 1e-6
OBJ_TOL = 1e-9
MAX_NEWTON_ITER = 100

_GH_NODES, _GH_WEIGHTS = np.polynomial.hermite.hermgauss(16)


@dataclass(frozen=True)
class TrainingSet:
    """Scaled day positions and observed daily counts."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.ascontiguousarray(self.xs, float)
        ys = np.ascontiguousarray(self.ys, float)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if xs.ndim != 1 or ys.ndim != 1 or xs.shape != ys.shape:
            raise ShapeMismatch("xs and ys must be 1-d and equally long")
        if len(xs) == 0:
            raise ValueError("training set is empty")
        if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
            raise ValueError("training data must be finite")
        if (xs < 0).any():
            raise ValueError("inputs must be non-negative")
        if (ys < 0).any():
            raise ValueError("counts must be non-negative")


@dataclass(frozen=True)
class LaplaceFit:
    """Mode, curvature and evidence of one Laplace fit."""

    fhat: np.ndarray
    alpha: np.ndarray
    w: np.ndarray
    log_marginal: float
    loglik: float
    n_iter: int
    sqrt_w: np.ndarray = field(repr=False)
    chol_b: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class PosteriorPredictive:
    """Latent mean/covariance and the implied booking-rate forecast."""

    mean: np.ndarray
    cov: np.ndarray
    rate_mean: np.ndarray


def _initial_f(ys):
    return _backend.softplus_inv(np.maximum(ys, 0.5))


def find_mode(train: TrainingSet, k_shifted: CovMatrix) -> LaplaceFit:
    """Newton search for the posterior mode under the shifted covariance.

    Convergence requires the objective gradient inf-norm below 1e-6 or an
    objective change below 1e-9, within 100 damped iterations.
    """
    if not k_shifted.shifted:
        raise ValueError("find_mode requires a shifted covariance")
    if k_shifted.entries.shape != (len(train.xs), len(train.xs)):
        raise ShapeMismatch("covariance does not match the training set")
    try:
        res = _backend.newton_mode(
            k_shifted.entries,
            train.ys,
            _initial_f(train.ys),
            chol_kt=k_shifted.chol,
            grad_tol=GRAD_TOL,
            obj_tol=OBJ_TOL,
            max_iter=MAX_NEWTON_ITER,
        )
    except FloatingPointError as exc:
        raise NoConvergence(str(exc)) from exc
    except la.LinAlgError as exc:
        raise NumericalBreakdown("factorization failed during mode search") from exc
    if not np.isfinite(res["log_marginal"]):
        raise NumericalBreakdown("non-finite log marginal likelihood")
    return LaplaceFit(
        fhat=res["f"],
        alpha=res["alpha"],
        w=res["w"],
        log_marginal=res["log_marginal"],
        loglik=res["loglik"],
        n_iter=res["n_iter"],
        sqrt_w=res["sqrt_w"],
        chol_b=res["chol_b"],
    )


def log_marginal(fit: LaplaceFit, train: TrainingSet, k_shifted: CovMatrix) -> float:
    """Laplace evidence recomputed from first principles.

    log q(y) = log p(y|f^) - 1/2 f^T K~^-1 f^ - 1/2 log det(I + W^1/2 K~ W^1/2)
    with W clamped away from zero before the square root.
    """
    ll = _backend.poisson_log_lik(train.ys, fit.fhat)
    chol = k_shifted.chol
    if chol is None:
        chol = la.cholesky(k_shifted.entries, lower=True, check_finite=False)
    half = la.solve_triangular(chol, fit.fhat, lower=True, check_finite=False)
    quad = float(half @ half)
    sw = np.sqrt(np.maximum(fit.w, 1e-9))
    b_mat = sw[:, None] * k_shifted.entries * sw[None, :]
    b_mat[np.diag_indices_from(b_mat)] += 1.0
    chol_b = la.cholesky(b_mat, lower=True, check_finite=False)
    value = ll - 0.5 * quad - float(np.sum(np.log(np.diag(chol_b))))
    if not np.isfinite(value):
        raise NumericalBreakdown("non-finite log marginal likelihood")
    return value


def _rate_forecast(mean, var, forecast: str):
    if forecast == "plugin":
        return _backend.softplus(mean)
    if forecast == "integrated":
        sd = np.sqrt(np.maximum(var, 0.0))
        nodes = mean[:, None] + np.sqrt(2.0) * sd[:, None] * _GH_NODES[None, :]
        vals = _backend.softplus(nodes)
        return vals @ _GH_WEIGHTS / np.sqrt(np.pi)
    raise ValueError("forecast must be 'plugin' or 'integrated'")


def predict(fit: LaplaceFit, train: TrainingSet, spec, test_xs,
            forecast: str = "plugin") -> PosteriorPredictive:
    """Posterior predictive at new inputs.

    The latent mean uses the shifted-training form K_*^T (K + D)^-1 f^ (i.e.
    K_*^T alpha); the covariance is K_** - K_*^T W^1/2 B^-1 W^1/2 K_*.  Tiny
    negative predictive variances (>= -1e-8) are clamped to zero.  An empty
    test input is allowed and yields empty arrays.
    """
    test_xs = np.ascontiguousarray(test_xs, float)
    k_star = build_cov(train.xs, test_xs, spec).entries
    mean = k_star.T @ fit.alpha
    v = la.solve_triangular(
        fit.chol_b, fit.sqrt_w[:, None] * k_star, lower=True, check_finite=False
    ) if len(test_xs) else np.zeros((len(train.xs), 0))
    k_test = build_cov(test_xs, test_xs, spec).entries
    cov = k_test - v.T @ v
    for i in range(cov.shape[0]):
        if -1e-8 <= cov[i, i] < 0.0:
            cov[i, i] = 0.0
    rate = _rate_forecast(mean, np.diag(cov).copy(), forecast)
    return PosteriorPredictive(mean=mean, cov=cov, rate_mean=rate)


# ---------------------------------------------------------------------------
# hyperparameter grids


def _axis(values=None, num=None, lo=None, hi=None, scale="linear"):
    if values is not None:
        arr = np.asarray(values, float)
    elif scale == "log":
        arr = np.exp(np.linspace(np.log(lo), np.log(hi), num))
    else:
        arr = np.linspace(lo, hi, num)
    if arr.ndim != 1 or len(arr) == 0 or not np.isfinite(arr).all():
        raise ValueError("bad grid axis")
    return arr


@dataclass(frozen=True)
class HyperGrid:
    """Cartesian grid over (sigma, c, p) with uniform prior mass."""

    axes: dict
    points: tuple

    @classmethod
    def from_axes(cls, sigma, c, p) -> "HyperGrid":
        sigma = np.asarray(sigma, float)
        c = np.asarray(c, float)
        p = np.asarray(p, float)
        points = tuple(
            PolyKernelParams(sigma=s, c=cc, p=pp)
            for s, cc, pp in itertools.product(sigma, c, p)
        )
        return cls(axes={"sigma": sigma, "c": c, "p": p}, points=points)

    @classmethod
    def default(cls) -> "HyperGrid":
        return cls.from_axes(
            _axis(num=7, lo=0.1, hi=10.0, scale="log"),
            _axis(num=5, lo=0.01, hi=2.0, scale="log"),
            _axis(num=7, lo=0.25, hi=4.0),
        )

    @classmethod
    def default_side(cls) -> "HyperGrid":
        """Coarse 3x3x3 grid used on each side of a changepoint."""
        return cls.from_axes(
            _axis(num=3, lo=0.1, hi=10.0, scale="log"),
            _axis(num=3, lo=0.01, hi=2.0, scale="log"),
            _axis(num=3, lo=0.25, hi=4.0),
        )

    @classmethod
    def from_config(cls, cfg: dict) -> "HyperGrid":
        axes = []
        defaults = {
            "sigma": dict(num=7, lo=0.1, hi=10.0, scale="log"),
            "c": dict(num=5, lo=0.01, hi=2.0, scale="log"),
            "p": dict(num=7, lo=0.25, hi=4.0, scale="linear"),
        }
        for name, dflt in defaults.items():
            spec = cfg.get(name, dflt)
            if isinstance(spec, (list, tuple, np.ndarray)):
                axes.append(_axis(values=spec))
            else:
                merged = {**dflt, **spec}
                axes.append(_axis(**merged))
        return cls.from_axes(*axes)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class ChangepointGrid:
    """Changepoint locations crossed with a per-side hyperparameter grid."""

    xcs: np.ndarray
    side: HyperGrid

    @classmethod
    def default(cls, x_lo: float, x_hi: float, num_xc: int = 9) -> "ChangepointGrid":
        fracs = (np.arange(num_xc) + 1.0) / (num_xc + 1.0)
        return cls(xcs=x_lo + fracs * (x_hi - x_lo), side=HyperGrid.default_side())

    def joint_points(self):
        """Explicit (before, after, xc) product — exponentially larger than
        the factorized evaluation, used for cross-checks."""
        return tuple(
            ChangepointKernelParams(before=b, after=a, xc=xc)
            for xc in self.xcs
            for b in self.side.points
            for a in self.side.points
        )


@dataclass(frozen=True)
class MarginalResult:
    """Grid-quadrature posterior: weights are softmax evidence over points."""

    predictive: PosteriorPredictive
    points: tuple
    log_marginals: np.ndarray
    weights: np.ndarray
    dropped: tuple


@dataclass(frozen=True)
class ChangepointMarginalResult:
    predictive: PosteriorPredictive
    xcs: np.ndarray
    xc_weights: np.ndarray
    n_failed: int


# A small cache of elementwise-power matrices: across one marginalization 245
# grid points share only 35 distinct (c, p) pairs, and curves censored with
# the same window share training inputs, so the (x x' + c)^p factor is by far
# the most recyclable piece of work.
_POW_CACHE: dict = {}
_POW_CACHE_MAX = 96


def _poly_base(xs, xs2, c: float, p: float):
    key = (xs.tobytes(), xs2.tobytes(), float(c), float(p))
    hit = _POW_CACHE.get(key)
    if hit is not None:
        return hit
    base = np.power(np.multiply.outer(xs, xs2) + c, p)
    if len(_POW_CACHE) >= _POW_CACHE_MAX:
        _POW_CACHE.pop(next(iter(_POW_CACHE)))
    _POW_CACHE[key] = base
    return base


def _fit_one(train, spec, test_xs, forecast, shift):
    if isinstance(spec, PolyKernelParams):
        base = _poly_base(train.xs, train.xs, spec.c, spec.p)
        cov = CovMatrix(entries=spec.sigma ** 2 * base)
    else:
        cov = build_cov(train.xs, train.xs, spec)
    kt = apply_shift(cov, shift)
    fit = find_mode(train, kt)
    pred = predict(fit, train, spec, test_xs, forecast=forecast)
    return fit, pred


def _combine(preds, weights):
    m = preds[0].mean.shape[0]
    mean = np.zeros(m)
    rate = np.zeros(m)
    cov = np.zeros((m, m))
    for pred, w in zip(preds, weights):
        mean += w * pred.mean
        rate += w * pred.rate_mean
        cov += w * (pred.cov + np.outer(pred.mean, pred.mean))
    cov -= np.outer(mean, mean)
    return PosteriorPredictive(mean=mean, cov=cov, rate_mean=rate)


def marginalize(train: TrainingSet, grid, test_xs, forecast: str = "plugin",
                shift: float = DEFAULT_SHIFT) -> MarginalResult:
    """Fit every grid point and average predictives by evidence weight.

    Uniform prior mass per point; softmax of the Laplace log marginals gives
    the weights.  Points that fail numerically are dropped and the remaining
    weights renormalized; if nothing survives, ``AllGridPointsFailed``.
    """
    points = grid.points if isinstance(grid, HyperGrid) else tuple(grid)
    test_xs = np.ascontiguousarray(test_xs, float)
    log_zs = np.full(len(points), -np.inf)
    preds = []
    kept = []
    dropped = []
    for i, spec in enumerate(points):
        try:
            fit, pred = _fit_one(train, spec, test_xs, forecast, shift)
        except (SingularShift, NoConvergence, NumericalBreakdown) as exc:
            dropped.append((i, exc))
            continue
        log_zs[i] = fit.log_marginal
        preds.append(pred)
        kept.append(i)
    if not kept:
        raise AllGridPointsFailed("all %d grid points failed" % len(points))
    kept_lz = log_zs[kept]
    w_kept = np.exp(kept_lz - logsumexp(kept_lz))
    w_kept /= w_kept.sum()
    weights = np.zeros(len(points))
    weights[kept] = w_kept
    return MarginalResult(
        predictive=_combine(preds, w_kept),
        points=tuple(points),
        log_marginals=log_zs,
        weights=weights,
        dropped=tuple(i for i, _ in dropped),
    )


def marginalize_changepoint(train: TrainingSet, grid: ChangepointGrid, test_xs,
                            forecast: str = "plugin",
                            shift: float = DEFAULT_SHIFT) -> ChangepointMarginalResult:
    """Evidence-weighted average over changepoint locations.

    The covariance is block diagonal across xc, so for a fixed xc the joint
    fit over (before, after) hyperparameter pairs factorizes exactly: each
    side is fit independently, per-pair evidence is the product of the side
    evidences, and the predictive for test inputs at or beyond xc depends on
    the after side alone.  This evaluates sides once each instead of
    enumerating all pairs; the result matches the explicit product grid.
    """
    test_xs = np.ascontiguousarray(test_xs, float)
    if len(test_xs) and len(grid.xcs) and test_xs.min() < np.max(grid.xcs):
        raise ValueError("test inputs must lie at or beyond every candidate xc")
    log_ev = np.full(len(grid.xcs), -np.inf)
    per_xc_preds = {}
    n_failed = 0
    for j, xc in enumerate(grid.xcs):
        before = train.xs < xc
        parts = []
        ok = True
        for mask, wants_pred in ((before, False), (~before, True)):
            if not mask.any():
                if wants_pred:
                    ok = False
                else:
                    parts.append(0.0)
                continue
            side_train = TrainingSet(xs=train.xs[mask], ys=train.ys[mask])
            try:
                res = marginalize(
                    side_train, grid.side, test_xs if wants_pred else (),
                    forecast=forecast, shift=shift,
                )
            except AllGridPointsFailed:
                ok = False
                break
            n_failed += len(res.dropped)
            survivors = res.log_marginals[np.isfinite(res.log_marginals)]
            parts.append(logsumexp(survivors) - np.log(len(survivors)))
            if wants_pred:
                per_xc_preds[j] = res.predictive
        if ok:
            log_ev[j] = sum(parts)
    live = np.isfinite(log_ev)
    if not live.any():
        raise AllGridPointsFailed("all changepoint candidates failed")
    xc_weights = np.zeros(len(grid.xcs))
    xc_weights[live] = np.exp(log_ev[live] - logsumexp(log_ev[live]))
    xc_weights[live] /= xc_weights[live].sum()
    combined = _combine(
        [per_xc_preds[j] for j in np.flatnonzero(live)], xc_weights[live]
    )
    return ChangepointMarginalResult(
        predictive=combined,
        xcs=np.asarray(grid.xcs, float),
        xc_weights=xc_weights,
        n_failed=n_failed,
    )
