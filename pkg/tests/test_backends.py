"""Pure-NumPy and compiled backends must agree function for function."""
import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from uncon import _backend, _purepy

_core = pytest.importorskip("uncon._core")


def _mats(seed, n=40):
    rng = np.random.default_rng(seed)
    xs = np.sort(rng.uniform(0.0, 1.0, n))
    ys = rng.poisson(4.0, n).astype(float)
    return xs, ys


class TestFunctionParity:
    def test_poly_cov_matches(self):
        xs, _ = _mats(0)
        xs2 = np.linspace(0.0, 1.2, 17)
        for sigma, c, p in [(1.0, 0.1, 2.0), (3.0, 0.01, 0.25), (0.5, 1.5, 3.7)]:
            a = _purepy.poly_cov(xs, xs2, sigma, c, p)
            b = _core.poly_cov(xs, xs2, sigma, c, p)
            assert_allclose(a, b, rtol=1e-13, atol=1e-13)

    def test_softplus_matches_over_wide_range(self):
        f = np.concatenate([np.linspace(-750, 750, 301), [0.0, -1e-12, 1e-12]])
        assert_allclose(_purepy.softplus(f), _core.softplus(f), rtol=1e-14, atol=1e-300)

    def test_poisson_log_lik_matches(self):
        rng = np.random.default_rng(3)
        y = rng.poisson(3.0, 200).astype(float)
        f = rng.normal(0.0, 4.0, 200)
        assert_allclose(_purepy.poisson_log_lik(y, f),
                        _core.poisson_log_lik(y, f), rtol=1e-12)

    def test_poisson_terms_match(self):
        rng = np.random.default_rng(4)
        y = rng.poisson(2.0, 500).astype(float)
        f = rng.normal(0.0, 8.0, 500)
        ll_a, grad_a, w_a = _purepy.poisson_terms(y, f)
        ll_b, grad_b, w_b = _core.poisson_terms(y, f)
        assert_allclose(ll_a, ll_b, rtol=1e-12)
        assert_allclose(grad_a, grad_b, rtol=1e-12, atol=1e-14)
        assert_allclose(w_a, w_b, rtol=1e-12, atol=1e-14)

    def test_newton_mode_matches(self):
        xs, ys = _mats(7)
        kt = _purepy.poly_cov(xs, xs, 2.0, 0.5, 2.0)
        kt[np.diag_indices_from(kt)] += 1.0
        f0 = np.zeros(len(ys))
        a = _purepy.newton_mode(kt, ys, f0)
        b = _core.newton_mode(kt, ys, f0)
        assert_allclose(a["f"], b["f"], atol=1e-9)
        assert_allclose(a["log_marginal"], b["log_marginal"], rtol=1e-10)
        assert a["n_iter"] == b["n_iter"]

    def test_newton_mode_budget_error_matches(self):
        xs, ys = _mats(9)
        kt = _purepy.poly_cov(xs, xs, 2.0, 0.5, 2.0)
        kt[np.diag_indices_from(kt)] += 1.0
        for mod in (_purepy, _core):
            with pytest.raises(FloatingPointError):
                mod.newton_mode(kt, ys, np.zeros(len(ys)), max_iter=1)


class TestSelection:
    def test_active_backend_is_compiled_by_default(self):
        assert _backend.BACKEND_NAME == "compiled"

    def _probe(self, env_value):
        env = dict(os.environ, UNCON_BACKEND=env_value)
        return subprocess.run(
            [sys.executable, "-c",
             "from uncon._backend import BACKEND_NAME; print(BACKEND_NAME)"],
            capture_output=True, text=True, env=env)

    def test_env_forces_python(self):
        proc = self._probe("python")
        assert proc.returncode == 0
        assert proc.stdout.strip() == "python"

    def test_env_forces_compiled(self):
        proc = self._probe("compiled")
        assert proc.returncode == 0
        assert proc.stdout.strip() == "compiled"

    def test_env_rejects_unknown_value(self):
        proc = self._probe("fortran")
        assert proc.returncode != 0
        assert "UNCON_BACKEND" in proc.stderr
