# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False, language_level=3
"""Compiled mirror of ``uncon._purepy``.

Same functions, same formulas, same stabilizations; the win is fused scalar
loops for the likelihood terms and a Newton iteration that talks to LAPACK
directly instead of building numpy temporaries.  ``uncon._backend`` falls
back to the pure-python module when this extension is missing.
"""
import numpy as np
from numpy.linalg import LinAlgError

cimport numpy as cnp
from libc.math cimport exp, fabs, lgamma, log, log1p, pow, sqrt
from scipy.linalg.cython_blas cimport ddot, dsymv
from scipy.linalg.cython_lapack cimport dpotrf, dpotrs

cnp.import_array()

BACKEND_NAME = "compiled"

cdef double _F_CLIP = 700.0
cdef double _W_FLOOR = 1e-9


def poly_cov(xs, xs2, double sigma, double c, double p):
    """Elementwise sigma^2 * (x * x' + c)^p for two input vectors."""
    cdef double[::1] a = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] b = np.ascontiguousarray(xs2, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], i, j
    cdef double s2 = sigma * sigma
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(n):
        for j in range(m):
            o[i, j] = s2 * pow(a[i] * b[j] + c, p)
    return out


cdef inline double _clip_f(double f) nogil:
    if f > _F_CLIP:
        return _F_CLIP
    if f < -_F_CLIP:
        return -_F_CLIP
    return f


cdef inline double _softplus1(double f) nogil:
    cdef double fc = _clip_f(f)
    if fc >= 0.0:
        return fc + log1p(exp(-fc))
    return log1p(exp(fc))


def softplus(f):
    arr = np.asarray(f, dtype=np.float64)
    flat = np.ascontiguousarray(arr.reshape(-1))
    out = np.empty_like(flat)
    cdef double[::1] src = flat
    cdef double[::1] dst = out
    cdef Py_ssize_t i
    for i in range(src.shape[0]):
        dst[i] = _softplus1(src[i])
    return out.reshape(arr.shape)


def softplus_inv(v):
    """Inverse of softplus: log(exp(v) - 1), stable for positive v."""
    v = np.asarray(v, dtype=np.float64)
    return v + np.log(-np.expm1(-v))


cdef double _terms(double[::1] y, double[::1] f, double[::1] grad,
                   double[::1] w) nogil:
    """Fused log-likelihood, gradient and negative curvature of the
    Poisson/softplus model; returns the summed log-likelihood."""
    cdef Py_ssize_t i, n = f.shape[0]
    cdef double fc, t, one_pt, s, lam, r, tml, num, u, ll = 0.0
    for i in range(n):
        fc = _clip_f(f[i])
        t = exp(-fabs(fc))
        one_pt = 1.0 + t
        s = (1.0 if fc >= 0.0 else t) / one_pt
        lam = (fc if fc > 0.0 else 0.0) + log1p(t)
        r = s / lam
        if t > 1e-3:
            tml = t - log1p(t)
        else:
            tml = t * t * (0.5 - t / 3.0 + 0.25 * t * t)
        num = (1.0 - t * lam) if fc >= 0.0 else tml
        u = num / (one_pt * lam)
        ll += y[i] * log(lam) - lam - lgamma(y[i] + 1.0)
        grad[i] = y[i] * r - s
        # t/(1+t)^2 rather than s(1-s): the latter rounds to zero once the
        # sigmoid saturates, losing strict log-concavity in float arithmetic
        w[i] = t / (one_pt * one_pt) + y[i] * r * u
    return ll


def poisson_log_lik(y, f) -> float:
    """Total log p(y | f) for independent Poisson counts with softplus rate."""
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
    cdef Py_ssize_t n = fv.shape[0]
    scratch = np.empty(2 * n, dtype=np.float64)
    cdef double[::1] g = scratch[:n]
    cdef double[::1] w = scratch[n:]
    return _terms(yv, fv, g, w)


def poisson_terms(y, f):
    """Fused likelihood evaluation: (ll, grad, w) with w = -d2/df2."""
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
    grad = np.empty(fv.shape[0], dtype=np.float64)
    w = np.empty(fv.shape[0], dtype=np.float64)
    cdef double[::1] g = grad
    cdef double[::1] wv = w
    cdef double ll = _terms(yv, fv, g, wv)
    return ll, grad, w


cdef int _chol_lower(double[:, ::1] a) nogil:
    """In-place Cholesky of a row-major symmetric matrix.

    LAPACK is column-major, so asking for its upper factor of the transposed
    view leaves the row-major LOWER triangle holding L with a = L L^T.
    Returns the LAPACK info code (0 on success).
    """
    cdef int n = <int> a.shape[0], info = 0
    dpotrf("U", &n, &a[0, 0], &n, &info)
    return info


cdef void _chol_solve(double[:, ::1] chol, double[::1] x) nogil:
    """Solve (L L^T) out = x in place given the row-major lower factor."""
    cdef int n = <int> chol.shape[0], nrhs = 1, info = 0
    dpotrs("U", &n, &nrhs, &chol[0, 0], &n, &x[0], &n, &info)


cdef void _symv(double[:, ::1] a, double[::1] x, double[::1] out) nogil:
    cdef int n = <int> a.shape[0], one = 1
    cdef double zero = 0.0, unit = 1.0
    dsymv("U", &n, &unit, &a[0, 0], &n, &x[0], &one, &zero, &out[0], &one)


cdef double _dot(double[::1] a, double[::1] b) nogil:
    cdef int n = <int> a.shape[0], one = 1
    return ddot(&n, &a[0], &one, &b[0], &one)


def newton_mode(kt, y, f0, chol_kt=None, double grad_tol=1e-6,
                double obj_tol=1e-9, int max_iter=100, int max_halvings=20):
    """Newton search for the Laplace mode in the stabilized B-parametrization.

    Mirrors the pure-python implementation: maintains the consistent pair
    (f, a = kt^{-1} f), builds B = I + sqrt(W) kt sqrt(W) each iteration,
    and step-halves on the penalized objective evaluated in O(n) from the
    quadratic-form interpolation.  Raises ``LinAlgError`` on a failed
    factorization and ``FloatingPointError`` when the budget runs out.
    """
    cdef cnp.ndarray[double, ndim=2] kt_a = np.ascontiguousarray(kt, dtype=np.float64)
    cdef double[:, ::1] kt_v = kt_a
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] f_arr = np.array(f0, dtype=np.float64, copy=True)
    cdef double[::1] f = f_arr
    cdef Py_ssize_t n = f.shape[0], i
    cdef int info
    if n == 0:
        raise ValueError("newton_mode needs a non-empty training set")

    cdef cnp.ndarray[double, ndim=2] chol_kt_a
    if chol_kt is None:
        chol_kt_a = kt_a.copy()
        info = _chol_lower(chol_kt_a)
        if info != 0:
            raise LinAlgError("covariance factorization failed (info=%d)" % info)
    else:
        chol_kt_a = np.ascontiguousarray(chol_kt, dtype=np.float64)

    cdef cnp.ndarray[double, ndim=1] a_arr = f_arr.copy()
    cdef double[::1] a = a_arr
    _chol_solve(chol_kt_a, a)

    cdef cnp.ndarray[double, ndim=1] grad = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] w_raw = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] sw = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] b_mat = np.empty((n, n), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] rhs = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] work = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] a_new = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] f_new = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] f_try = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] grad_try = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] w_try = np.empty(n, dtype=np.float64)
    cdef double[::1] grad_v = grad, w_raw_v = w_raw, sw_v = sw
    cdef double[:, ::1] b_v = b_mat
    cdef double[::1] rhs_v = rhs, work_v = work, a_new_v = a_new, f_new_v = f_new
    cdef double[::1] f_try_v = f_try, grad_try_v = grad_try, w_try_v = w_try

    cdef double q00 = _dot(a, f)
    cdef double ll = _terms(yv, f, grad_v, w_raw_v)
    cdef double psi = -0.5 * q00 + ll
    cdef double wi, q11, q01, step, q_try, ll_try, psi_try, delta, gnorm
    cdef bint converged = False, accepted
    cdef int n_iter = 0, it, h
    cdef Py_ssize_t j

    for it in range(1, max_iter + 1):
        n_iter = it
        for i in range(n):
            wi = w_raw_v[i]
            if wi < _W_FLOOR:
                wi = _W_FLOOR
            sw_v[i] = sqrt(wi)
            rhs_v[i] = wi * f[i] + grad_v[i]
        for i in range(n):
            for j in range(n):
                b_v[i, j] = sw_v[i] * kt_v[i, j] * sw_v[j]
            b_v[i, i] += 1.0
        info = _chol_lower(b_v)
        if info != 0:
            raise LinAlgError("curvature factorization failed (info=%d)" % info)
        _symv(kt_v, rhs_v, work_v)
        for i in range(n):
            work_v[i] *= sw_v[i]
        _chol_solve(b_v, work_v)
        for i in range(n):
            a_new_v[i] = rhs_v[i] - sw_v[i] * work_v[i]
        _symv(kt_v, a_new_v, f_new_v)
        q11 = _dot(a_new_v, f_new_v)
        q01 = _dot(a_new_v, f)
        step = 1.0
        accepted = False
        ll_try = 0.0
        psi_try = 0.0
        q_try = 0.0
        for h in range(max_halvings + 1):
            for i in range(n):
                f_try_v[i] = f[i] + step * (f_new_v[i] - f[i])
            q_try = ((1.0 - step) * (1.0 - step) * q00
                     + 2.0 * step * (1.0 - step) * q01
                     + step * step * q11)
            ll_try = _terms(yv, f_try_v, grad_try_v, w_try_v)
            psi_try = -0.5 * q_try + ll_try
            if psi_try > psi:
                accepted = True
                break
            step *= 0.5
        if accepted:
            delta = psi_try - psi
            for i in range(n):
                f[i] = f_try_v[i]
                a[i] = a[i] + step * (a_new_v[i] - a[i])
                grad_v[i] = grad_try_v[i]
                w_raw_v[i] = w_try_v[i]
            q00 = q_try
            ll = ll_try
            psi = psi_try
        else:
            delta = 0.0
        gnorm = 0.0
        for i in range(n):
            if fabs(grad_v[i] - a[i]) > gnorm:
                gnorm = fabs(grad_v[i] - a[i])
        if gnorm < grad_tol or fabs(delta) < obj_tol:
            converged = True
            break
    if not converged:
        raise FloatingPointError(
            "mode search did not converge in %d iterations" % max_iter)

    cdef double half_logdet_b = 0.0
    for i in range(n):
        wi = w_raw_v[i]
        if wi < _W_FLOOR:
            wi = _W_FLOOR
        sw_v[i] = sqrt(wi)
    for i in range(n):
        for j in range(n):
            b_v[i, j] = sw_v[i] * kt_v[i, j] * sw_v[j]
        b_v[i, i] += 1.0
    info = _chol_lower(b_v)
    if info != 0:
        raise LinAlgError("curvature factorization failed (info=%d)" % info)
    for i in range(n):
        half_logdet_b += log(b_v[i, i])
        for j in range(i + 1, n):
            b_v[i, j] = 0.0
    return {
        "f": f_arr,
        "alpha": a_arr,
        "w": w_raw,
        "sqrt_w": sw,
        "chol_b": b_mat,
        "loglik": ll,
        "log_marginal": ll - 0.5 * q00 - half_logdet_b,
        "n_iter": n_iter,
    }
