"""
调和延拓、网格黎兹变换、求积预言机与半空间配对积分
"""
import math

import numpy as np
import pytest
from scipy import integrate

from backend.app.core.exceptions import ConfigError, EvaluationDomainError, NonDecayingInputError
from backend.app.services.harmonic.families import (
    AffineHarmonic,
    GaussianBump,
    GridHarmonic,
    PlaneWave,
    gradient_field,
)
from backend.app.services.harmonic.grid import (
    GridFunction,
    GridSpec,
    extend_harmonic,
    riesz_transform,
    trig_evaluate,
)
from backend.app.services.harmonic.oracle import (
    HALF_SPACE_ORIENTATION,
    grid_riesz_pairing,
    gundy_varopoulos_pairing,
    harmonic_measure_cdf_1d,
    harmonic_measure_density,
    periodic_hilbert_quadrature_1d,
)


class TestGrid:

    def test_axis(self):
        np.testing.assert_allclose(GridSpec(1, L=1.0, M=4).axis(), [-1.0, -0.5, 0.0, 0.5])

    def test_invalid_spec(self):
        with pytest.raises(ConfigError):
            GridSpec(2, M=48)
        with pytest.raises(ConfigError):
            GridSpec(4)

    def test_plane_wave_riesz(self):
        spec = GridSpec(2, L=math.pi, M=32)
        wave = PlaneWave([1.0, 2.0], phase=0.4)
        grid = wave.to_grid(spec)
        for j in (1, 2):
            expected = wave.riesz_boundary(spec.points(), j)
            np.testing.assert_allclose(riesz_transform(grid, j).values, expected, atol=1e-12)

    def test_riesz_square_sum(self):
        spec = GridSpec(2, L=10.0, M=64)
        f = GaussianBump([0.5, -1.0], grid=spec).to_grid(spec)
        total = sum(riesz_transform(riesz_transform(f, j), j).values for j in (1, 2))
        np.testing.assert_allclose(total, -(f.values - f.mean()), atol=1e-10)

    def test_extension_of_plane_wave(self):
        spec = GridSpec(1, L=math.pi, M=16)
        wave = PlaneWave([3.0])
        extended = extend_harmonic(wave.to_grid(spec), [0.0, 0.5])
        points = np.concatenate([np.full((16, 1), 0.5), spec.points()], axis=-1)
        np.testing.assert_allclose(extended[0].values, wave.to_grid(spec).values, atol=1e-13)
        np.testing.assert_allclose(extended[1].values, wave.value(points), atol=1e-13)

    def test_negative_height(self):
        spec = GridSpec(1, L=math.pi, M=16)
        with pytest.raises(EvaluationDomainError):
            extend_harmonic(PlaneWave([1.0]).to_grid(spec), [-0.1])

    def test_trig_evaluation_off_grid(self, rng):
        spec = GridSpec(1, L=math.pi, M=16)
        wave = PlaneWave([3.0], phase=0.2)
        points = np.stack([rng.uniform(0.0, 1.0, 20), rng.uniform(-math.pi, math.pi, 20)], axis=1)
        out = trig_evaluate(wave.to_grid(spec), points)
        np.testing.assert_allclose(out[:, 0], wave.value(points), atol=1e-12)
        np.testing.assert_allclose(out[:, 1:], wave.gradient(points), atol=1e-12)


class TestFamilies:

    def test_affine(self):
        f = AffineHarmonic.coordinate(1, 2)
        points = np.array([[0.5, 2.0, -1.0]])
        assert f.value(points)[0] == 2.0
        np.testing.assert_array_equal(f.gradient(points)[0], [0.0, 1.0, 0.0])
        assert AffineHarmonic.constant_function(3.0, 1).value([[1.0, 4.0]])[0] == 3.0

    def test_plane_wave_zero_frequency(self):
        with pytest.raises(ConfigError):
            PlaneWave([0.0, 0.0])

    def test_gaussian_boundary_closed_form(self):
        bump = GaussianBump([0.0])
        assert bump.value(np.array([[0.0, 0.7]]))[0] == pytest.approx(math.exp(-0.245), rel=1e-12)

    def test_gaussian_gradient_matches_differences(self):
        bump = GaussianBump([0.3], width=0.8, amplitude=2.0)
        point = np.array([0.6, -0.2])
        step = 1e-5
        gradient = bump.gradient(point[None, :])[0]
        for axis in range(2):
            shift = np.zeros(2)
            shift[axis] = step
            difference = (bump.value((point + shift)[None, :]) - bump.value((point - shift)[None, :]))[0] / (2 * step)
            assert gradient[axis] == pytest.approx(difference, abs=1e-7)

    def test_conjugate_boundary_is_hilbert(self):
        bump = GaussianBump([0.0], width=1.3)
        x = np.linspace(-3.0, 3.0, 13)
        points = np.stack([np.zeros_like(x), x], axis=1)
        np.testing.assert_allclose(bump.conjugate(points), bump.hilbert_boundary(x), atol=1e-13)

    def test_hilbert_closed_form_requires_line(self):
        with pytest.raises(ConfigError):
            GaussianBump([0.0, 0.0], grid=GridSpec(2, M=16)).hilbert_boundary(np.zeros((1, 2)))

    def test_table_matches_trig(self, rng):
        spec = GridSpec(2, L=10.0, M=64)
        grid = GaussianBump([0.0, 0.0], grid=spec).to_grid(spec)
        table = GridHarmonic(grid, table_height=8.0, table_levels=65)
        exact = GridHarmonic(grid, method="trig")
        points = np.stack([rng.uniform(0.2, 3.0, 30), rng.uniform(-3, 3, 30), rng.uniform(-3, 3, 30)], axis=1)
        np.testing.assert_allclose(table.value(points), exact.value(points), atol=5e-3)
        np.testing.assert_allclose(table.gradient(points), exact.gradient(points), atol=5e-3)

    def test_gradient_field_rejects_lower_half_space(self):
        with pytest.raises(EvaluationDomainError):
            gradient_field(PlaneWave([1.0]), np.array([[-0.5, 0.0]]))


class TestOracles:

    @pytest.mark.parametrize("y", [0.5, 2.0])
    def test_poisson_kernel_mass(self, y):
        line, _ = integrate.quad(lambda x: float(harmonic_measure_density(y, x, 1)), -np.inf, np.inf)
        plane, _ = integrate.quad(lambda r: 2 * math.pi * r * float(harmonic_measure_density(y, np.array([r, 0.0]), 2)),
                                  0.0, np.inf)
        assert line == pytest.approx(1.0, abs=1e-8)
        assert plane == pytest.approx(1.0, abs=1e-8)

    def test_cauchy_cdf(self):
        assert harmonic_measure_cdf_1d(1.0, 0.0) == pytest.approx(0.5)
        assert harmonic_measure_cdf_1d(2.0, 2.0) == pytest.approx(0.75)

    def test_grid_hilbert_matches_periodic_quadrature(self):
        spec = GridSpec(1, L=20.0, M=256)
        bump = GaussianBump([0.0], grid=spec)
        transformed = riesz_transform(bump.to_grid(spec), 1)
        axis = spec.axis()
        for n in (120, 128, 140):
            quadrature = periodic_hilbert_quadrature_1d(lambda t: float(bump.boundary(np.array([t]))), axis[n], spec.L)
            assert transformed.values[n] == pytest.approx(quadrature, abs=1e-7)

    def test_non_decaying_pairing_rejected(self):
        with pytest.raises(NonDecayingInputError):
            grid_riesz_pairing(PlaneWave([1.0]), PlaneWave([1.0]), 1)

    @pytest.mark.parametrize("d,M", [(1, 256), (2, 64)])
    def test_half_space_pairing_orientation(self, d, M):
        spec = GridSpec(d, L=20.0 if d == 1 else 12.0, M=M)
        offset = np.zeros(d)
        offset[0] = 1.0
        f = GaussianBump(np.zeros(d), grid=spec)
        g = GaussianBump(offset, grid=spec)
        grid_value = grid_riesz_pairing(f, g, 1, spec)
        result = gundy_varopoulos_pairing(f, g, 1, spec)
        assert abs(grid_value) > 0.05
        assert result["value"] == pytest.approx(HALF_SPACE_ORIENTATION * grid_value, rel=1e-3)
        assert result["tail_bound"] < 1e-6
