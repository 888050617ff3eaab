import numpy as np
import pytest

from autoscale_kit.l2s import (
    L2SConfig,
    L2SState,
    center_loss,
    fit,
    grad_r,
    update_center,
)


class TestCenterLoss:
    def test_zero_at_fixed_point(self):
        assert center_loss([2.0, 8.0], [2.0, 1.0], 8.0) == 0.0

    def test_hand_cases(self):
        assert center_loss([1.0], [2.0], 0.0) == pytest.approx(8.0)
        assert center_loss([1.0, 4.0], [1.0, 1.0], 2.0) == pytest.approx(2.5)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            center_loss([1.0, 2.0], [1.0], 1.0)

    def test_nonnegative_and_zero_iff_clustered(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            s = rng.uniform(0.5, 9, size=5)
            r = rng.uniform(0.5, 3, size=5)
            c = float(rng.uniform(0, 10))
            val = center_loss(s, r, c)
            assert val >= 0
            assert (val == 0) == bool(np.all(s * r * r == c))


class TestGradR:
    def test_fixed_point(self):
        assert grad_r(1.0, 1.0, 1.0) == 0.0

    def test_hand_case(self):
        assert grad_r(2.0, 1.0, 0.0) == pytest.approx(8.0)

    def test_finite_differences(self):
        rng = np.random.default_rng(1)
        h = 1e-6
        for _ in range(1000):
            s = float(rng.uniform(0.5, 10))
            r = float(rng.uniform(0.5, 3))
            c = float(rng.uniform(0, 10))
            fd = (center_loss([s], [r + h], c) - center_loss([s], [r - h], c)) / (2 * h)
            g = grad_r(s, r, c)
            # mixed abs/rel scale avoids blowups where the gradient crosses zero
            assert abs(g - fd) <= 1e-6 * max(1.0, abs(g), abs(fd))


class TestUpdateCenter:
    def test_no_change_at_fixed_point(self):
        assert update_center([2.0, 8.0], [2.0, 1.0], 8.0, 0.5) == pytest.approx(8.0)

    def test_hand_single_region(self):
        # delta = (2 - 0) / 2 = 1, new center = 2 - 1 * 1 = 1
        assert update_center([1.0], [0.0], 2.0, 1.0) == pytest.approx(1.0)

    def test_hand_balanced_pair(self):
        # residuals (2-1) + (2-3) cancel; center unchanged
        assert update_center([1.0, 3.0], [1.0, 1.0], 2.0, 0.5) == pytest.approx(2.0)


class TestFit:
    def test_feasible_fixed_point_stays(self):
        state = fit([4.0], init=L2SState(np.array([1.0]), 4.0, 0))
        assert state.loss_trace[-1] <= 1e-9
        assert state.r[0] ** 2 * 4.0 == pytest.approx(state.center, abs=1e-4)

    def test_two_levels_cluster(self):
        state = fit([1.0, 4.0])
        u = np.array([1.0, 4.0]) * state.r**2
        assert abs(u[0] - u[1]) <= 1e-3

    def test_infeasible_pins_and_keeps_loss(self):
        state = fit([1.0, 1000.0])
        cfg = L2SConfig()
        at_bound = (np.abs(state.r - cfg.r_min) < 1e-12) | (
            np.abs(state.r - cfg.r_max) < 1e-12
        )
        assert at_bound.any()
        assert state.loss_trace[-1] > 0
        assert np.all((state.r >= cfg.r_min) & (state.r <= cfg.r_max))

    def test_monotone_loss_in_stable_regime(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            s = rng.uniform(0.5, 10.0, size=8)
            state = fit(s)
            trace = np.asarray(state.loss_trace)
            assert np.all(np.diff(trace) <= 1e-12)

    def test_r_always_clamped(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            s = np.exp(rng.uniform(np.log(0.5), np.log(500), size=6))
            state = fit(s, L2SConfig(max_iters=500))
            assert np.all((state.r >= 0.5) & (state.r <= 3.0))

    def test_frozen_center_reaches_analytic_minimizer(self):
        rng = np.random.default_rng(4)
        cfg = L2SConfig(update_interval=0, max_iters=50000, tol=1e-16)
        for _ in range(10):
            s = rng.uniform(0.5, 10.0, size=5)
            c = float(rng.uniform(1.0, 9.0))
            state = fit(s, cfg, init=L2SState(np.ones(5), c, 0))
            expected = np.clip(np.sqrt(c / s), cfg.r_min, cfg.r_max)
            np.testing.assert_allclose(state.r, expected, atol=1e-4)
            assert state.center == c  # frozen

    def test_trace_starts_with_initial_loss(self):
        state = fit([2.0, 3.0])
        r0 = np.ones(2)
        assert state.loss_trace[0] == pytest.approx(
            center_loss([2.0, 3.0], r0, 2.5)
        )
        assert len(state.loss_trace) == state.iters + 1
        assert len(state.center_trace) == state.iters + 1

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            fit([])
        with pytest.raises(ValueError):
            fit([1.0, np.nan])
        with pytest.raises(ValueError):
            fit([1.0, -2.0])
        with pytest.raises(ValueError):
            L2SConfig(r_min=2.0, r_max=1.0)
