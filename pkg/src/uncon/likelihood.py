"""Poisson observation model with a softplus inverse link.

The latent function f is mapped to a positive rate lam = log(1 + e^f) and
daily bookings are modelled as y ~ Poisson(lam).  All derivatives are taken
with respect to f.  Latent values are clipped to [-700, 700] before
evaluation; counts up to 1e6 stay finite.
"""
from __future__ import annotations

import numpy as np

from . import _backend
from .errors import ShapeMismatch

__all__ = ["softplus", "softplus_inv", "log_lik", "dlog_lik", "d2log_lik"]

softplus = _backend.softplus
softplus_inv = _backend.softplus_inv


def _check(y, f):
    y = np.atleast_1d(np.asarray(y, float))
    f = np.atleast_1d(np.asarray(f, float))
    if y.shape != f.shape:
        raise ShapeMismatch("y and f differ in shape: %s vs %s" % (y.shape, f.shape))
    if np.any(y < 0) or not np.all(np.isfinite(y)):
        raise ValueError("counts must be finite and non-negative")
    return y, f


def log_lik(y, f) -> float:
    """Summed log p(y | f) = sum y*log(lam) - lam - log(y!)."""
    y, f = _check(y, f)
    return _backend.poisson_log_lik(y, f)


def dlog_lik(y, f):
    """Elementwise first derivative of log p(y | f) in f."""
    y, f = _check(y, f)
    _, grad, _ = _backend.poisson_terms(y, f)
    return grad


def d2log_lik(y, f):
    """Elementwise second derivative of log p(y | f) in f (negative)."""
    y, f = _check(y, f)
    _, _, w = _backend.poisson_terms(y, f)
    return -w
