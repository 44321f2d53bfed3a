import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uncon.baselines import SeriesTask, des


class TestSeriesTask:
    def test_needs_three_points(self):
        with pytest.raises(ValueError):
            SeriesTask(cumulative=np.array([1.0, 2.0]), horizon=3)

    def test_rejects_decreasing(self):
        with pytest.raises(ValueError):
            SeriesTask(cumulative=np.array([1.0, 3.0, 2.0]), horizon=1)

    def test_rejects_empty_horizon(self):
        with pytest.raises(ValueError):
            SeriesTask(cumulative=np.array([1.0, 2.0, 3.0]), horizon=0)


class TestDes:
    def test_linear_input_exact_linear_forecast(self):
        for slope, intercept in ((2.5, 3.0), (0.0, 7.0), (11.0, 0.0)):
            y = intercept + slope * np.arange(15)
            out = des(SeriesTask(cumulative=y, horizon=6))
            want = y[-1] + slope * np.arange(1, 7)
            np.testing.assert_allclose(out.unconstrained, want, atol=1e-9)

    @given(st.floats(0.0, 50.0), st.floats(0.0, 1000.0))
    @settings(max_examples=50, deadline=None)
    def test_linear_exactness_property(self, slope, intercept):
        y = intercept + slope * np.arange(12)
        out = des(SeriesTask(cumulative=y, horizon=4))
        np.testing.assert_allclose(
            out.unconstrained, y[-1] + slope * np.arange(1, 5), atol=1e-6)

    def test_translation_equivariance(self):
        rng = np.random.default_rng(2)
        y = np.cumsum(rng.poisson(4.0, 30)).astype(float)
        base = des(SeriesTask(cumulative=y, horizon=5)).unconstrained
        moved = des(SeriesTask(cumulative=y + 250.0, horizon=5)).unconstrained
        np.testing.assert_allclose(moved, base + 250.0, atol=1e-9)

    def test_forecast_clamped_at_last_observation(self):
        # series that flattens out: the fitted trend from the early rise
        # would otherwise predict below the final level for small steps
        y = np.concatenate([5.0 * np.arange(10), np.full(6, 45.0)])
        y = np.maximum.accumulate(y)
        out = des(SeriesTask(cumulative=y, horizon=4))
        assert np.all(out.unconstrained >= y[-1])

    def test_grid_tie_break_is_deterministic(self):
        y = np.arange(10.0)  # every grid point fits perfectly: first wins
        a = des(SeriesTask(cumulative=y, horizon=3)).unconstrained
        b = des(SeriesTask(cumulative=y, horizon=3)).unconstrained
        np.testing.assert_array_equal(a, b)

    def test_tracks_trend_change_better_than_global_line(self):
        # piecewise series whose recent slope differs from the overall one;
        # smoothing should weight the recent trend
        y = np.concatenate([1.0 * np.arange(20), 19.0 + 5.0 * np.arange(1, 11)])
        out = des(SeriesTask(cumulative=y, horizon=3)).unconstrained
        global_slope = (y[-1] - y[0]) / (len(y) - 1)
        global_line = y[-1] + global_slope * np.arange(1, 4)
        recent_line = y[-1] + 5.0 * np.arange(1, 4)
        assert np.abs(out - recent_line).max() < np.abs(out - global_line).max()

    def test_horizon_length(self):
        y = np.cumsum(np.ones(8))
        out = des(SeriesTask(cumulative=y, horizon=17))
        assert out.unconstrained.shape == (17,)
