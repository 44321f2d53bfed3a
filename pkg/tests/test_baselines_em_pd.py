import numpy as np
import pytest
from scipy import integrate, optimize, stats

from uncon.baselines import UnconstrainOutput, UnorderedTask, em, mean_impute, pd
from uncon.baselines import _em_estep, _pd_estep
from uncon.errors import DegenerateSpread, NoReferenceCurves, ShapeMismatch

RNG = np.random.default_rng(90210)


def censored_task(values, limit):
    values = np.asarray(values, float)
    cens = values >= limit
    observed = np.where(cens, limit, values)
    return UnorderedTask(values=observed, censored=cens,
                         limits=np.full(len(values), float(limit)))


class TestUnorderedTask:
    def test_rejects_mismatched_shapes(self):
        with pytest.raises(ShapeMismatch):
            UnorderedTask(values=np.ones(3), censored=np.zeros(2, bool),
                          limits=np.ones(3))

    def test_rejects_censored_values_off_their_limits(self):
        with pytest.raises(ValueError):
            UnorderedTask(values=np.array([1.0, 5.0]),
                          censored=np.array([False, True]),
                          limits=np.array([0.0, 4.0]))

    def test_rejects_fully_censored(self):
        with pytest.raises(NoReferenceCurves):
            UnorderedTask(values=np.array([2.0, 2.0]),
                          censored=np.array([True, True]),
                          limits=np.array([2.0, 2.0]))


class TestEStepOracles:
    def test_truncated_mean_example(self):
        # mu 10, sigma sqrt(2), limit one-over-sqrt-2 sigmas above the mean
        mu, sigma = 10.0, np.sqrt(2.0)
        z = 1.0 / np.sqrt(2.0)
        got = _em_estep(mu, sigma, np.array([mu + sigma * z]))[0]
        want = mu + sigma * stats.norm.pdf(z) / stats.norm.sf(z)
        np.testing.assert_allclose(got, want, rtol=1e-12)

    def test_em_estep_matches_quadrature_1000_tuples(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            mu = rng.uniform(-50, 50)
            sigma = rng.uniform(0.1, 20)
            z = rng.uniform(-5, 5)
            b = mu + sigma * z
            got = _em_estep(mu, sigma, np.array([b]))[0]
            num, _ = integrate.quad(
                lambda x: x * stats.norm.pdf(x, mu, sigma), b, mu + 12 * sigma,
                limit=200)
            want = num / stats.norm.sf(z)
            assert abs(got - want) <= 1e-6 * max(1.0, abs(want))

    def test_pd_estep_matches_inversion_1000_tuples(self):
        rng = np.random.default_rng(4)
        for _ in range(1000):
            mu = rng.uniform(-50, 50)
            sigma = rng.uniform(0.1, 20)
            z = rng.uniform(-6, 6)
            tau = rng.uniform(0.05, 0.95)
            b = mu + sigma * z
            got = _pd_estep(mu, sigma, np.array([b]), tau)[0]
            target = tau * stats.norm.sf(z)
            want = optimize.brentq(
                lambda q: stats.norm.sf((q - mu) / sigma) - target,
                b - 1e-9, mu + 12 * sigma, xtol=1e-12, rtol=8.9e-16)
            assert abs(got - want) <= 1e-6 * max(1.0, abs(want))

    def test_far_tail_stability(self):
        est = _em_estep(0.0, 1.0, np.array([-40.0, 40.0]))
        assert np.isfinite(est).all()
        np.testing.assert_allclose(est[0], 0.0, atol=1e-12)  # limit far below
        assert est[1] >= 40.0

    def test_estimates_never_below_limits(self):
        limits = RNG.uniform(-30, 30, 200)
        assert np.all(_em_estep(0.0, 2.0, limits) >= limits)
        assert np.all(_pd_estep(0.0, 2.0, limits, 0.5) >= limits)


class TestEmIteration:
    def test_collapse_when_limits_far_below_mean(self):
        # limits below mu - 3 sigma barely censor anything: estimates land
        # on (essentially at) the population mean's truncated value
        rng = np.random.default_rng(8)
        free = rng.normal(100.0, 5.0, 60)
        limit = 100.0 - 3.5 * 5.0
        values = np.concatenate([free, np.full(10, limit)])
        cens = np.zeros(70, bool)
        cens[60:] = True
        task = UnorderedTask(values=values, censored=cens,
                             limits=np.full(70, limit))
        out = em(task)
        mu_final = np.concatenate([free, out.unconstrained]).mean()
        assert np.max(np.abs(out.unconstrained - mu_final)) < 0.5

    def test_monotone_in_limits(self):
        free = RNG.normal(50, 10, 40)
        t1 = UnorderedTask(values=np.append(free, 55.0),
                           censored=np.append(np.zeros(40, bool), True),
                           limits=np.append(free, 55.0))
        t2 = UnorderedTask(values=np.append(free, 60.0),
                           censored=np.append(np.zeros(40, bool), True),
                           limits=np.append(free, 60.0))
        assert em(t2).unconstrained[0] > em(t1).unconstrained[0]

    def test_pd_median_below_em_mean(self):
        # the tail median sits below the tail mean for a normal
        free = RNG.normal(50, 10, 40)
        task = UnorderedTask(values=np.append(free, 60.0),
                             censored=np.append(np.zeros(40, bool), True),
                             limits=np.append(free, 60.0))
        assert pd(task).unconstrained[0] < em(task).unconstrained[0]

    def test_no_censored_entries_short_circuits(self):
        task = UnorderedTask(values=np.arange(5.0), censored=np.zeros(5, bool),
                             limits=np.arange(5.0))
        out = em(task)
        assert out.unconstrained.size == 0 and out.converged

    def test_degenerate_spread_falls_back_to_mean_impute(self):
        task = UnorderedTask(values=np.array([5.0, 5.0, 5.0, 7.0]),
                             censored=np.array([False, False, False, True]),
                             limits=np.array([5.0, 5.0, 5.0, 7.0]))
        with pytest.warns(DegenerateSpread):
            out = em(task)
        assert out.flag == "degenerate_spread"
        np.testing.assert_allclose(out.unconstrained, [7.0])

    def test_iteration_budget_respected(self):
        free = RNG.normal(0, 1, 20)
        task = UnorderedTask(values=np.append(free, 2.0),
                             censored=np.append(np.zeros(20, bool), True),
                             limits=np.append(free, 2.0))
        out = em(task, tol=1e-300, max_iter=7)
        assert out.iterations == 7 and not out.converged

    def test_parameter_validation(self):
        task = censored_task(RNG.normal(10, 2, 30), 12.0)
        with pytest.raises(ValueError):
            em(task, tol=-1.0)
        with pytest.raises(ValueError):
            pd(task, tau=0.0)
        with pytest.raises(ValueError):
            pd(task, tau=1.0)


class TestMeanImpute:
    def test_uses_uncensored_mean_with_limit_floor(self):
        task = UnorderedTask(values=np.array([4.0, 6.0, 3.0, 9.0]),
                             censored=np.array([False, False, True, True]),
                             limits=np.array([0.0, 0.0, 3.0, 9.0]))
        out = mean_impute(task)
        np.testing.assert_allclose(out.unconstrained, [5.0, 9.0])
