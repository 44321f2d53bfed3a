"""Backend selection: compiled extension if available, NumPy otherwise.

Set ``UNCON_BACKEND=python`` or ``UNCON_BACKEND=compiled`` to force a choice
(the latter raises if the extension is missing).
"""
import os

from . import _purepy

_choice = os.environ.get("UNCON_BACKEND", "").strip().lower()

if _choice in ("", "compiled", "c"):
    try:
        from . import _core as _impl
    except ImportError:
        if _choice:
            raise ImportError(
                "UNCON_BACKEND=%s requested but uncon._core is not built" % _choice
            )
        _impl = _purepy
elif _choice in ("python", "numpy", "py"):
    _impl = _purepy
else:
    raise ValueError("unrecognized UNCON_BACKEND value: %r" % _choice)

BACKEND_NAME = _impl.BACKEND_NAME
poly_cov = _impl.poly_cov
softplus = _impl.softplus
softplus_inv = _purepy.softplus_inv
poisson_log_lik = _impl.poisson_log_lik
poisson_terms = _impl.poisson_terms
newton_mode = _impl.newton_mode
