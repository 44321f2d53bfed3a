"""Covariance functions for booking-curve regression.

The workhorse is a polynomial covariance with a real-valued (not necessarily
integer) degree,

    k(x, x') = sigma^2 (x x' + c)^p ,

which is indefinite for non-integer p, so training matrices are stabilized by
an explicit spectral shift (adding d to the diagonal) before factorization.
A changepoint variant glues two independent polynomial kernels at a boundary
xc: points on opposite sides have zero covariance, the boundary itself
belongs to the after side.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from . import _backend
from .errors import SingularShift

__all__ = [
    "PolyKernelParams",
    "ChangepointKernelParams",
    "CovMatrix",
    "poly_kernel",
    "changepoint_kernel",
    "build_cov",
    "apply_shift",
]

DEFAULT_SHIFT = 1.0
MAX_SHIFT_DOUBLINGS = 3


@dataclass(frozen=True)
class PolyKernelParams:
    """Hyperparameters of the variable-degree polynomial covariance."""

    sigma: float
    c: float
    p: float

    def __post_init__(self):
        if not (self.sigma > 0 and np.isfinite(self.sigma)):
            raise ValueError("sigma must be positive and finite")
        if not (self.c >= 0 and np.isfinite(self.c)):
            raise ValueError("c must be non-negative and finite")
        if not (self.p > 0 and np.isfinite(self.p)):
            raise ValueError("p must be positive and finite")


@dataclass(frozen=True)
class ChangepointKernelParams:
    """Two independent polynomial regimes split at xc."""

    before: PolyKernelParams
    after: PolyKernelParams
    xc: float

    def __post_init__(self):
        if not np.isfinite(self.xc):
            raise ValueError("xc must be finite")


@dataclass(frozen=True)
class CovMatrix:
    """A covariance matrix plus its stabilization bookkeeping.

    ``chol`` caches the lower Cholesky factor certified by ``apply_shift``;
    it is carried along so downstream solves need not refactorize.
    """

    entries: np.ndarray
    shift: float = 0.0
    chol: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def shifted(self) -> bool:
        return self.shift > 0.0


def poly_kernel(x: float, x2: float, params: PolyKernelParams) -> float:
    """Scalar covariance sigma^2 (x x2 + c)^p.

    Inputs are assumed non-negative (scaled day positions), keeping the base
    of the real power positive.
    """
    return params.sigma ** 2 * (x * x2 + params.c) ** params.p


def changepoint_kernel(x: float, x2: float, params: ChangepointKernelParams) -> float:
    """Scalar changepoint covariance: per-side polynomial, zero across xc."""
    left = x < params.xc
    left2 = x2 < params.xc
    if left != left2:
        return 0.0
    side = params.before if left else params.after
    return poly_kernel(x, x2, side)


def _poly_block(xs, xs2, params: PolyKernelParams):
    return _backend.poly_cov(xs, xs2, params.sigma, params.c, params.p)


def build_cov(xs, xs2, spec) -> CovMatrix:
    """Assemble the covariance matrix between two sets of inputs.

    Square results over identical inputs are symmetrized as (K + K^T)/2 to
    remove floating-point asymmetry before factorization.
    """
    xs = np.ascontiguousarray(xs, float)
    xs2 = np.ascontiguousarray(xs2, float)
    if isinstance(spec, PolyKernelParams):
        k = _poly_block(xs, xs2, spec)
    elif isinstance(spec, ChangepointKernelParams):
        k = np.zeros((len(xs), len(xs2)))
        left = xs < spec.xc
        left2 = xs2 < spec.xc
        for mask, mask2, side in (
            (left, left2, spec.before),
            (~left, ~left2, spec.after),
        ):
            if mask.any() and mask2.any():
                k[np.ix_(mask, mask2)] = _poly_block(xs[mask], xs2[mask2], side)
    else:
        raise TypeError("unsupported kernel spec: %r" % (spec,))
    if k.shape[0] == k.shape[1] and xs.shape == xs2.shape and np.array_equal(xs, xs2):
        k = 0.5 * (k + k.T)
    return CovMatrix(entries=k, shift=0.0)


def apply_shift(cov: CovMatrix, d: float = DEFAULT_SHIFT) -> CovMatrix:
    """Stabilize a square covariance by adding d to the diagonal.

    The shift moves every eigenvalue up by exactly d.  Positive definiteness
    is certified with a Cholesky factorization (cached on the result); on
    failure d is doubled, at most three times, before ``SingularShift`` is
    raised.
    """
    k = cov.entries
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise ValueError("shift requires a square covariance")
    d = float(d)
    if not (d > 0 and np.isfinite(d)):
        raise ValueError("shift must be positive and finite")
    for _ in range(MAX_SHIFT_DOUBLINGS + 1):
        kt = k.copy()
        kt[np.diag_indices_from(kt)] += d
        try:
            chol = la.cholesky(kt, lower=True, check_finite=False)
        except la.LinAlgError:
            d *= 2.0
            continue
        if np.isfinite(chol[np.diag_indices_from(chol)]).all():
            return CovMatrix(entries=kt, shift=cov.shift + d, chol=chol)
        d *= 2.0
    raise SingularShift(
        "covariance not positive definite after %d shift doublings" % MAX_SHIFT_DOUBLINGS
    )
