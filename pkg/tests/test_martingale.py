"""
离散鞅、鞅变换与结构恒等式
"""
import numpy as np
import pytest

from backend.app.core.exceptions import RieszLabError
from backend.app.services.harmonic.families import AffineHarmonic, GaussianBump, HarmonicSum, PlaneWave
from backend.app.services.martingale.engine import (
    CoarseMartingaleObserver,
    FineMartingaleObserver,
    continuous_pairing_accumulator,
    hessian_bound,
    martingale_f,
    martingale_transform,
    pairing_density,
    transform_increments,
    transform_matrix,
    verify_cauchy_riemann,
    verify_transform_identity,
)
from backend.app.services.stochastics import (
    BrownianPath,
    CoarseBatchEngine,
    FineBatchEngine,
    WalkConfig,
    block_generator,
    simulate_fine_walk,
)


class TestTransformMatrix:

    def test_column_action(self):
        expected = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        np.testing.assert_array_equal(transform_matrix(1, 2), expected)

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_basis_action(self, i):
        basis = np.eye(4)
        matrix = transform_matrix(i, 3)
        np.testing.assert_array_equal(matrix @ basis[0], basis[i])
        np.testing.assert_array_equal(matrix @ basis[i], -basis[0])

    def test_index_guard(self):
        with pytest.raises(RieszLabError):
            transform_matrix(3, 2)

    def test_pairing_density_is_antisymmetric(self, rng):
        a, b = rng.standard_normal((2, 10, 4))
        for i in (1, 2, 3):
            np.testing.assert_allclose(pairing_density(a, b, i), -pairing_density(b, a, i), atol=1e-15)
            expected = np.einsum("pa,ab,pb->p", b, transform_matrix(i, 3), a)
            np.testing.assert_allclose(pairing_density(a, b, i), expected, atol=1e-14)

    def test_transform_increments(self):
        gradients = np.array([[2.0, 3.0]])
        increments = np.array([[0.5, -1.0]])
        # A_1∇f = (−3, 2)
        assert transform_increments(gradients, increments, 1)[0] == pytest.approx(-3.5)


class TestCauchyRiemann:

    @pytest.mark.parametrize("d,i,k", [(1, 1, 1), (1, 1, 3), (2, 1, 2), (2, 2, 2), (3, 3, 2)])
    def test_layer_increments(self, d, i, k):
        cfg = WalkConfig(d=d, i=i, T=1.0, N=2)
        assert verify_cauchy_riemann(cfg, k) <= 1e-13

    def test_embedding_in_deeper_tree(self):
        cfg = WalkConfig(d=2, i=1, T=1.0, N=2)
        assert verify_cauchy_riemann(cfg, 1, depth=6) <= 1e-13

    def test_shallower_embedding_rejected(self):
        with pytest.raises(RieszLabError):
            verify_cauchy_riemann(WalkConfig(d=2, i=1), 2, depth=3)


class TestTransformIdentity:

    def test_affine_is_exact(self):
        cfg = WalkConfig(d=2, i=1, T=1.0, N=2)
        f = AffineHarmonic(0.5, [1.0, -2.0, 0.3])
        result = verify_transform_identity(cfg, 3, f)
        assert result["exact"] == 1.0
        assert result["discrepancy"] <= 1e-12

    @pytest.mark.parametrize("d,i,k", [(1, 1, 1), (2, 2, 2), (2, 2, 3), (3, 2, 2)])
    def test_sibling_constant_cases(self, d, i, k):
        cfg = WalkConfig(d=d, i=i, T=1.0, N=2)
        f = PlaneWave([0.7, 0.4, 0.25][:d], phase=0.3)
        result = verify_transform_identity(cfg, k, f)
        assert result["exact"] == 1.0
        assert result["discrepancy"] <= result["bound"]

    @pytest.mark.parametrize("d", [1, 2])
    def test_first_slice_is_bounded(self, d):
        cfg = WalkConfig(d=d, i=1, T=1.0, N=2)
        f = PlaneWave([0.7, 0.4][:d], phase=0.3)
        result = verify_transform_identity(cfg, 3, f)
        assert result["exact"] == 0.0
        assert result["discrepancy"] <= result["bound"]

    def test_hessian_bound(self):
        assert hessian_bound(AffineHarmonic.coordinate(1, 1), np.zeros((1, 2))) == 0.0
        assert hessian_bound(PlaneWave([3.0, 4.0], amplitude=2.0), np.zeros((1, 3))) == pytest.approx(50.0)
        combined = HarmonicSum([PlaneWave([1.0]), AffineHarmonic.coordinate(0, 1)], [2.0, 1.0])
        assert hessian_bound(combined, np.zeros((1, 2))) == pytest.approx(2.0)
        assert hessian_bound(GaussianBump([0.0]), np.array([[0.5, 0.0]])) > 0.0


class TestPathMartingales:

    def test_affine_martingale_telescopes(self, rng):
        cfg = WalkConfig(d=2, i=2, T=1.0, N=2)
        tosses = (2 * rng.integers(0, 2, size=2 * 16 + 1) - 1).astype(np.int8)
        path = simulate_fine_walk(cfg, tosses, k_max=16, stop=False)
        f = AffineHarmonic(1.0, [0.5, -1.0, 2.0])
        plain = martingale_f(path, f)
        assert plain.terminal == pytest.approx(float(f.value(path.positions[-1])), abs=1e-12)
        transformed = martingale_transform(path, f)
        assert transformed.values[0] == 0.0
        assert transformed.increments.shape == (16,)

    def test_continuous_pairing_stops_at_hit(self):
        f, g = AffineHarmonic(0.0, [1.0, 0.0]), AffineHarmonic(0.0, [0.0, 1.0])
        times = np.arange(4.0)
        positions = np.array([[3.0, 0.0], [2.0, 0.1], [1.0, 0.2], [0.5, 0.3]])
        free = BrownianPath(positions[0], 1.0, times, positions, False, None, None)
        assert continuous_pairing_accumulator(free, f, g, 1) == pytest.approx(3.0)
        hit = BrownianPath(positions[0], 1.0, times, positions, True, 1.5, 2)
        assert continuous_pairing_accumulator(hit, f, g, 1) == pytest.approx(1.5)
        assert continuous_pairing_accumulator(hit, g, f, 1) == pytest.approx(-1.5)


class TestObservers:

    def test_fine_observer_telescopes_for_affine(self):
        cfg = WalkConfig(d=2, i=1, T=2.0, N=2, y=0.8)
        f = AffineHarmonic(0.2, [1.0, 0.5, -0.5])
        observer = FineMartingaleObserver(f, g=[f, f])
        engine = FineBatchEngine(cfg, 256, block_generator(1, 0, 1), slices=[1, 2]).run([observer])
        expected = f.value(engine.positions)
        np.testing.assert_allclose(observer.plain, expected, atol=1e-12)
        np.testing.assert_allclose(observer.test, expected, atol=1e-12)

    def test_coarse_observer_telescopes_for_affine(self):
        cfg = WalkConfig(d=2, i=2, T=2.0, N=2, y=0.8)
        f = AffineHarmonic(-0.4, [2.0, 1.0, 0.0])
        observer = CoarseMartingaleObserver(f)
        engine = CoarseBatchEngine(cfg, 256, block_generator(1, 0, 2)).run([observer])
        np.testing.assert_allclose(observer.plain[0], f.value(engine.positions[0]), atol=1e-12)
