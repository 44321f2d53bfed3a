"""NumPy reference implementations of the numerical hot paths.

The compiled extension (``uncon._core``) mirrors this module function for
function; ``uncon._backend`` picks whichever is available.  Keep the two in
algorithmic lockstep — tests compare them directly.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg as la
from scipy.special import gammaln

BACKEND_NAME = "python"

_F_CLIP = 700.0
_W_FLOOR = 1e-9


def poly_cov(xs, xs2, sigma: float, c: float, p: float):
    """Elementwise sigma^2 * (x * x' + c)^p for two input vectors."""
    g = np.multiply.outer(np.asarray(xs, float), np.asarray(xs2, float))
    return (sigma * sigma) * np.power(g + c, p)


def softplus(f):
    f = np.clip(np.asarray(f, float), -_F_CLIP, _F_CLIP)
    return np.maximum(f, 0.0) + np.log1p(np.exp(-np.abs(f)))


def softplus_inv(v):
    """Inverse of softplus: log(exp(v) - 1), stable for positive v."""
    v = np.asarray(v, float)
    return v + np.log(-np.expm1(-v))


def _link_terms(f):
    """Shared pieces of the Poisson/softplus likelihood.

    Returns (s, lam, r, u) where s = sigmoid(f), lam = softplus(f),
    r = s / lam and u = r - 1 + s evaluated without cancellation.
    """
    f = np.clip(np.asarray(f, float), -_F_CLIP, _F_CLIP)
    t = np.exp(-np.abs(f))
    one_pt = 1.0 + t
    s = np.where(f >= 0.0, 1.0, t) / one_pt
    lam = np.maximum(f, 0.0) + np.log1p(t)
    r = s / lam
    # u = r - 1 + s; the direct form cancels badly for f << 0, so use
    # u = (t - log1p(t)) / ((1+t) lam)   for f < 0   (series for tiny t)
    # u = (1 - t lam) / ((1+t) lam)      for f >= 0
    tml = np.where(
        t > 1e-3,
        t - np.log1p(t),
        t * t * (0.5 - t / 3.0 + 0.25 * t * t),
    )
    num = np.where(f >= 0.0, 1.0 - t * lam, tml)
    u = num / (one_pt * lam)
    return s, lam, r, u


def poisson_log_lik(y, f) -> float:
    """Total log p(y | f) for independent Poisson counts with softplus rate."""
    y = np.asarray(y, float)
    _, lam, _, _ = _link_terms(f)
    return float(np.sum(y * np.log(lam) - lam - gammaln(y + 1.0)))


def poisson_terms(y, f):
    """Fused likelihood evaluation.

    Returns (ll, grad, w) with ll the summed log-likelihood, grad its
    elementwise first derivative in f and w = -d2/df2 (positive).  The
    sigmoid-derivative term is evaluated as t/(1+t)^2 with t = e^{-|f|}
    rather than s(1-s), which would round to exactly zero once the sigmoid
    saturates.
    """
    y = np.asarray(y, float)
    f = np.clip(np.asarray(f, float), -_F_CLIP, _F_CLIP)
    s, lam, r, u = _link_terms(f)
    ll = float(np.sum(y * np.log(lam) - lam - gammaln(y + 1.0)))
    grad = y * r - s
    t = np.exp(-np.abs(f))
    w = t / (1.0 + t) ** 2 + y * r * u
    return ll, grad, w


def newton_mode(kt, y, f0, chol_kt=None, grad_tol: float = 1e-6,
                obj_tol: float = 1e-9, max_iter: int = 100,
                max_halvings: int = 20):
    """Newton search for the Laplace mode in the stabilized B-parametrization.

    ``kt`` is the (already shifted) training covariance.  Maintains the
    consistent pair (f, a = kt^{-1} f) so the penalized objective
    psi = -0.5 f.a + loglik(f) is available in O(n) during step halving.

    Returns a dict with the mode, dual vector, curvature diagonal, the
    Cholesky factor of B = I + sqrt(W) kt sqrt(W) at the mode, and the
    Laplace log marginal likelihood.

    Raises ``scipy.linalg.LinAlgError`` on a failed factorization and
    ``FloatingPointError`` if the iteration budget is exhausted.
    """
    kt = np.ascontiguousarray(kt, float)
    y = np.asarray(y, float)
    f = np.array(f0, float, copy=True)
    if chol_kt is None:
        chol_kt = la.cholesky(kt, lower=True, check_finite=False)
    a = la.cho_solve((chol_kt, True), f, check_finite=False)
    q00 = float(a @ f)
    ll, grad, w_raw = poisson_terms(y, f)
    psi = -0.5 * q00 + ll
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        w = np.maximum(w_raw, _W_FLOOR)
        sw = np.sqrt(w)
        b_mat = sw[:, None] * kt * sw[None, :]
        b_mat[np.diag_indices_from(b_mat)] += 1.0
        chol_b = la.cholesky(b_mat, lower=True, check_finite=False)
        rhs = w * f + grad
        v = kt @ rhs
        half = la.cho_solve((chol_b, True), sw * v, check_finite=False)
        a_new = rhs - sw * half
        f_new = kt @ a_new
        q11 = float(a_new @ f_new)
        q01 = float(a_new @ f)
        step_dir = f_new - f
        step = 1.0
        accepted = False
        for _ in range(max_halvings + 1):
            f_try = f + step * step_dir
            q_try = ((1.0 - step) ** 2 * q00
                     + 2.0 * step * (1.0 - step) * q01
                     + step * step * q11)
            ll_try, grad_try, w_try = poisson_terms(y, f_try)
            psi_try = -0.5 * q_try + ll_try
            if psi_try > psi:
                accepted = True
                break
            step *= 0.5
        if accepted:
            delta = psi_try - psi
            f = f_try
            a = a + step * (a_new - a)
            q00 = q_try
            ll, grad, w_raw = ll_try, grad_try, w_try
            psi = psi_try
        else:
            delta = 0.0
        gnorm = float(np.max(np.abs(grad - a))) if len(f) else 0.0
        if gnorm < grad_tol or abs(delta) < obj_tol:
            converged = True
            break
    if not converged:
        raise FloatingPointError("mode search did not converge in %d iterations" % max_iter)
    w = np.maximum(w_raw, _W_FLOOR)
    sw = np.sqrt(w)
    b_mat = sw[:, None] * kt * sw[None, :]
    b_mat[np.diag_indices_from(b_mat)] += 1.0
    chol_b = la.cholesky(b_mat, lower=True, check_finite=False)
    half_logdet_b = float(np.sum(np.log(np.diag(chol_b))))
    log_marginal = ll - 0.5 * q00 - half_logdet_b
    return {
        "f": f,
        "alpha": a,
        "w": w_raw,
        "sqrt_w": sw,
        "chol_b": chol_b,
        "loglik": ll,
        "log_marginal": log_marginal,
        "n_iter": n_iter,
    }
