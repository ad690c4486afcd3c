"""
抛币游走、粗步转移核、批量引擎、布朗参考与随机流
"""
import numpy as np
import pytest

from backend.app.core.exceptions import ConfigError, EnumerationCapError, LengthMismatchError
from backend.app.services.stochastics import (
    BrownianBatch,
    CoarseBatchEngine,
    CoarsePath,
    CoarseKernel,
    FineBatchEngine,
    WalkConfig,
    apply_stopping,
    block_generator,
    block_ranges,
    check_cap,
    coarse_grain,
    enumerate_walks,
    fine_increments,
    freeze_at_entry,
    layer_increment_field,
    sample_brownian,
    simulate_fine_walk,
    simulate_walk_family,
    sweep_stream,
)


class TestWalkConfig:

    def test_coupled_scales(self):
        cfg = WalkConfig(d=1, i=1, T=4.0, N=2)
        assert cfg.delta == pytest.approx(0.125)
        assert cfg.theta == pytest.approx(0.25)
        assert cfg.eps == pytest.approx(0.5)
        assert cfg.window == 2
        assert cfg.coarse_steps == 16
        assert cfg.fine_steps == 32
        assert cfg.step_size == pytest.approx(0.5)
        assert cfg.coarse_step_bound == pytest.approx(1.0)
        np.testing.assert_array_equal(cfg.start, [1.0, 0.0])

    def test_decoupled_scales(self):
        cfg = WalkConfig(d=2, i=2, T=1.0, mode="decoupled",
                         delta_value=0.01, theta_value=0.05, eps_value=0.2)
        assert cfg.window == 5
        assert cfg.coarse_steps == 20
        assert cfg.with_slice(1).i == 1

    def test_decoupled_ratio_must_be_integral(self):
        with pytest.raises(ConfigError):
            WalkConfig(mode="decoupled", delta_value=0.02, theta_value=0.05, eps_value=0.1)

    def test_coarse_step_shrinks_relative_to_band(self):
        configs = [WalkConfig(T=4.0, N=n) for n in (4, 8, 16)]
        ratios = [cfg.coarse_step_bound / cfg.eps for cfg in configs]
        assert ratios == sorted(ratios, reverse=True)
        assert ratios[0] == pytest.approx((8.0 / 4) ** 0.5)

    def test_slice_range(self):
        with pytest.raises(ConfigError):
            WalkConfig(d=2, i=3)


class TestIncrements:

    def test_selector_routes_the_toss(self):
        increments = fine_increments(np.array([[-1, 1], [1, -1]]), 1, 1, 1.0)
        np.testing.assert_array_equal(increments[0, 0], [0.0, 1.0])
        np.testing.assert_array_equal(increments[1, 0], [-1.0, 0.0])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            fine_increments(np.ones(4), 2, 1, 1.0)

    @pytest.mark.parametrize("d,i", [(1, 1), (2, 1), (2, 2), (3, 2)])
    def test_increment_covariance_is_delta_identity(self, d, i):
        cfg = WalkConfig(d=d, i=i, T=1.0, N=2)
        batch = enumerate_walks(cfg, 2)
        for k in range(2):
            dB = batch.increments[:, k]
            np.testing.assert_allclose(batch.expectation(dB), 0.0, atol=1e-15)
            covariance = batch.expectation(dB[:, :, None] * dB[:, None, :])
            np.testing.assert_allclose(covariance, cfg.delta * np.eye(d + 1), atol=1e-15)

    def test_layer_field_matches_enumeration(self):
        cfg = WalkConfig(d=2, i=2, T=1.0, N=2)
        batch = enumerate_walks(cfg, 3)
        np.testing.assert_array_equal(layer_increment_field(cfg, 3), batch.increments[:, 2])

    def test_enumeration_cap(self):
        with pytest.raises(EnumerationCapError):
            check_cap(23)
        with pytest.raises(EnumerationCapError):
            enumerate_walks(WalkConfig(d=2), 12)

    def test_conditional_expectation_is_martingale(self):
        cfg = WalkConfig(d=2, i=1, T=1.0, N=2)
        batch = enumerate_walks(cfg, 2)
        horizontal = batch.positions[:, 2, 1]
        known = 1 + cfg.d
        np.testing.assert_allclose(batch.conditional_expectation(horizontal, known),
                                   batch.conditional_expectation(batch.positions[:, 1, 1], known), atol=1e-15)


class TestSinglePaths:

    def test_fine_walk_shapes(self, rng):
        cfg = WalkConfig(d=2, i=1, T=1.0, N=2)
        tosses = (2 * rng.integers(0, 2, size=9) - 1).astype(np.int8)
        path = simulate_fine_walk(cfg, tosses, k_max=4, stop=False)
        assert path.positions.shape == (5, 3)
        coarse = coarse_grain(path, 2)
        assert coarse.steps == 2
        with pytest.raises(LengthMismatchError):
            coarse_grain(path, 3)

    def test_family_shares_horizontal_steps(self, rng):
        cfg = WalkConfig(d=2, i=1, T=1.0, N=2, y=50.0)
        tosses = (2 * rng.integers(0, 2, size=17) - 1).astype(np.int8)
        first, second = simulate_walk_family(cfg, tosses, k_max=8)
        np.testing.assert_array_equal(first.positions[:, 1:], second.positions[:, 1:])

    def test_stopping_freezes_coarse_path(self):
        positions = np.array([[1.0, 0.0], [0.5, 0.2], [0.05, 0.4], [0.4, 0.6]])
        stopped = apply_stopping(CoarsePath(positions, window=2, theta=0.1, stop_index=3), eps=0.1)
        assert stopped.stop_index == 2
        assert stopped.tau == pytest.approx(0.2)
        np.testing.assert_array_equal(stopped.positions[3], positions[2])
        never = apply_stopping(CoarsePath(positions, window=2, theta=0.1, stop_index=3), eps=0.01)
        assert never.stop_index == 3
        with pytest.raises(ConfigError):
            apply_stopping(never, eps=0.0)

    def test_freeze_clamps_overshoot(self):
        increments = np.array([[-0.5, 0.1], [0.5, 0.1]])
        frozen, live = freeze_at_entry(np.array([0.3, 0.0]), increments, eps=0.1)
        assert live == 1
        assert frozen[0, 0] == pytest.approx(-0.3)
        assert frozen[0, 1] == 0.1
        np.testing.assert_array_equal(frozen[1], 0.0)

    def test_fine_stop_stays_in_half_space(self, rng):
        cfg = WalkConfig(d=2, i=1, T=4.0, N=4, y=0.5)
        stopped = 0
        for _ in range(40):
            tosses = (2 * rng.integers(0, 2, size=cfg.fine_steps * cfg.d + 1) - 1).astype(np.int8)
            path = simulate_fine_walk(cfg, tosses)
            assert np.all(path.positions[:, 0] >= 0.0)
            k = path.stop_fine_index
            assert np.all(path.positions[:k, 0] > cfg.eps)
            if k == path.k_max:
                continue
            stopped += 1
            assert path.positions[k, 0] <= cfg.eps
            np.testing.assert_array_equal(path.increments[k:], 0.0)
            coarse = coarse_grain(path, cfg.window)
            assert coarse.stop_index == path.stop_coarse_index == -(-k // cfg.window)
            assert apply_stopping(coarse, cfg.eps).stop_index == coarse.stop_index
        assert stopped > 0

    def test_start_inside_band_stops_immediately(self, rng):
        cfg = WalkConfig(d=1, i=1, T=1.0, N=2, y=0.25)
        tosses = (2 * rng.integers(0, 2, size=cfg.fine_steps + 1) - 1).astype(np.int8)
        path = simulate_fine_walk(cfg, tosses)
        assert path.stop_fine_index == path.stop_coarse_index == 0
        np.testing.assert_array_equal(path.positions, path.positions[:1])


class TestCoarseKernel:

    @pytest.mark.parametrize("d,i,window", [(1, 1, 2), (2, 1, 3), (2, 2, 2)])
    def test_probabilities_and_mean(self, d, i, window):
        kernel = CoarseKernel(d, i, window)
        for s in (-1, 1):
            _, displacement, probabilities = kernel.distribution(s)
            assert probabilities.sum() == pytest.approx(1.0, abs=1e-15)
            np.testing.assert_allclose(kernel.moments(s)["mean"], 0.0, atol=1e-15)
            assert np.all(np.abs(displacement).sum(axis=1) <= window * d)

    @pytest.mark.parametrize("window", [1, 2, 4])
    def test_one_dimensional_trace(self, window):
        kernel = CoarseKernel(1, 1, window)
        for s in (-1, 1):
            assert np.trace(kernel.moments(s)["second"]) == pytest.approx(window)

    def test_pooled_second_moment(self):
        kernel = CoarseKernel(2, 1, 3)
        pooled = 0.5 * (kernel.moments(-1)["second"] + kernel.moments(1)["second"])
        np.testing.assert_allclose(pooled, 1.5 * np.eye(3), atol=1e-14)

    def test_fourth_moments_match_enumeration(self):
        cfg = WalkConfig(d=1, i=1, T=1.0, N=3)
        batch = enumerate_walks(cfg, 3)
        units = (batch.positions[:, 3] - cfg.start) / cfg.step_size
        enumerated = batch.expectation(np.abs(units) ** 4)
        kernel = CoarseKernel(1, 1, 3)
        pooled = 0.5 * (kernel.moments(-1)["abs4"] + kernel.moments(1)["abs4"])
        np.testing.assert_allclose(pooled, enumerated, rtol=1e-12)

    def test_sample_parity(self, rng):
        kernel = CoarseKernel(1, 1, 3)
        initial = np.where(rng.random(500) < 0.5, -1, 1).astype(np.int8)
        displacement, last = kernel.sample(initial, rng)
        assert displacement.shape == (500, 2)
        assert np.all(np.abs(displacement).sum(axis=1) % 2 == 1)
        assert set(np.unique(last)) <= {-1, 1}


class TestBatchEngines:

    @pytest.mark.parametrize("engine_type", [FineBatchEngine, CoarseBatchEngine])
    @pytest.mark.parametrize("d,N", [(1, 2), (2, 4)])
    def test_stopped_paths_are_inside_band(self, engine_type, d, N):
        cfg = WalkConfig(d=d, i=1, T=4.0, N=N, y=0.75)
        engine = engine_type(cfg, 300, block_generator(3, 0, 1)).run()
        stopped = engine.stop_index[0] < cfg.coarse_steps
        assert stopped.any()
        assert np.all(engine.positions[0, stopped, 0] <= cfg.eps)
        assert np.all(engine.positions[0, :, 0] >= 0.0)
        assert not engine.active[0, stopped].any()

    def test_family_members_share_horizontal_coordinates(self):
        cfg = WalkConfig(d=2, i=1, T=0.5, N=2, y=50.0)
        engine = FineBatchEngine(cfg, 64, block_generator(3, 0, 1), slices=[1, 2]).run()
        np.testing.assert_array_equal(engine.positions[0, :, 1:], engine.positions[1, :, 1:])

    def test_engines_agree_on_stopping_law(self):
        cfg = WalkConfig(d=2, i=2, T=1.0, N=3, y=0.5)
        fine = FineBatchEngine(cfg, 3000, block_generator(5, 0, 1)).run()
        coarse = CoarseBatchEngine(cfg, 3000, block_generator(5, 1, 1)).run()
        for statistic in (lambda e: e.stop_index[0].astype(float), lambda e: e.positions[0, :, 0]):
            a, b = statistic(fine), statistic(coarse)
            stderr = np.sqrt(a.var() / a.size + b.var() / b.size)
            assert abs(a.mean() - b.mean()) <= 4.0 * stderr
        assert np.all(coarse.positions[0, :, 0] >= 0.0)

    def test_same_seed_same_paths(self):
        cfg = WalkConfig(d=2, i=2, T=1.0, N=2)
        first = CoarseBatchEngine(cfg, 128, block_generator(9, 0, 2)).run()
        second = CoarseBatchEngine(cfg, 128, block_generator(9, 0, 2)).run()
        np.testing.assert_array_equal(first.positions, second.positions)
        np.testing.assert_array_equal(first.stop_index, second.stop_index)


class TestBrownian:

    def test_start_on_boundary(self, rng):
        batch = BrownianBatch([0.0, 0.3], 1.0, 0.01, 10, rng).run()
        assert batch.hit.all()
        np.testing.assert_array_equal(batch.hit_time, 0.0)

    def test_short_horizon_is_censored(self, rng):
        batch = BrownianBatch([1.0, 0.0], 1e-3, 1e-4, 50, rng).run()
        assert batch.censored.all()

    def test_adaptive_paths_hit_the_boundary(self, rng):
        batch = BrownianBatch([1.0, 0.0], 1e4, 1e-4, 200, rng, adaptive=0.01).run()
        assert batch.hit.mean() > 0.9
        np.testing.assert_array_equal(batch.positions[batch.hit, 0], 0.0)
        assert np.all(batch.hit_time[batch.hit] > 0.0)

    def test_single_path_exit(self, rng):
        path = sample_brownian([0.2, 0.0], 10.0, 1e-3, rng)
        if path.hit:
            assert path.exit_point[0] == 0.0
            assert 0.0 < path.hit_time <= 10.0


class TestStreams:

    def test_block_generators_are_reproducible(self):
        first = block_generator(7, 3, 1).random(4)
        np.testing.assert_array_equal(first, block_generator(7, 3, 1).random(4))
        assert not np.array_equal(first, block_generator(7, 3, 2).random(4))
        assert not np.array_equal(first, block_generator(7, 4, 1).random(4))

    def test_sweep_stream(self):
        assert sweep_stream(5, 3) == 5 | (3 << 8)
        with pytest.raises(ValueError):
            sweep_stream(5, 256)

    def test_block_ranges(self):
        assert block_ranges(10, 4) == [(0, 0, 4), (1, 4, 8), (2, 8, 10)]
