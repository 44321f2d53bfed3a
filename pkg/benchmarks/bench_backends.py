"""Compare the compiled and pure-python numerical backends.

Run with no arguments to benchmark both (the script re-executes itself under
``UNCON_BACKEND=python`` and ``UNCON_BACKEND=compiled``); set the variable
yourself to time just one.  Workloads: the fused likelihood terms, a single
Newton mode search, and a full default-grid marginalization — the unit of
work behind every GP-unconstrained curve.
"""
import os
import subprocess
import sys
import time

import numpy as np


def _bench_one() -> None:
    import uncon
    from uncon._backend import newton_mode, poisson_terms
    from uncon.gp import HyperGrid, TrainingSet, marginalize
    from uncon.kernels import PolyKernelParams, apply_shift, build_cov
    from uncon.simgen import gen_exp1

    rng = np.random.default_rng(7)
    n = 120
    xs = np.arange(n) / 139.0
    ys = gen_exp1("convex", 1, seed=1)[0].daily[:n].astype(float)
    f = rng.uniform(-20.0, 20.0, n)

    def timeit(fn, repeats):
        best = min(_timed(fn) for _ in range(repeats))
        return best

    def _timed(fn):
        t0 = time.perf_counter()
        fn()
        return time.perf_counter() - t0

    terms_t = timeit(lambda: [poisson_terms(ys, f) for _ in range(1000)], 3) / 1000

    cov = apply_shift(build_cov(xs, xs, PolyKernelParams(sigma=1.0, c=0.1, p=1.5)), 1.0)
    kt = cov.entries.copy()
    kt[np.diag_indices(n)] += cov.shift
    from uncon._backend import softplus_inv
    f0 = softplus_inv(np.maximum(ys, 0.5))
    newton_t = timeit(lambda: [newton_mode(kt, ys, f0) for _ in range(100)], 3) / 100

    train = TrainingSet(xs=xs, ys=ys)
    test = np.arange(n, 140) / 139.0
    grid = HyperGrid.default()
    marg_t = timeit(
        lambda: marginalize(train, grid, test, forecast="integrated"), 3)

    print("%-10s poisson_terms %8.1f us   newton_mode %7.2f ms   "
          "marginalize(245) %6.3f s"
          % (uncon.BACKEND_NAME, terms_t * 1e6, newton_t * 1e3, marg_t))


def main() -> None:
    if os.environ.get("UNCON_BACKEND"):
        _bench_one()
        return
    for backend in ("python", "compiled"):
        env = dict(os.environ, UNCON_BACKEND=backend)
        res = subprocess.run([sys.executable, os.path.abspath(__file__)], env=env)
        if res.returncode:
            print("backend %r unavailable (exit %d)" % (backend, res.returncode))


if __name__ == "__main__":
    main()
