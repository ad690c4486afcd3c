"""
实验运行器：确定性实验断言通过，蒙特卡洛实验在小规模固定种子下检查统计断言与报告结构
"""
import numpy as np
import pytest

from backend.app.config.run_config import EXPERIMENT_NAMES
from backend.app.core.exceptions import ConfigError
from backend.app.models.experiment_models import ReportStatus
from backend.app.services.experiments import EXPERIMENTS, run_experiment
from backend.app.services.experiments.moments import coarse_displacements, exact_moments, moment_constants
from backend.app.services.experiments.norms import run_norm_comparison
from backend.app.services.experiments.weak_convergence import constant_observable, run_martingale_approx, \
    run_weak_convergence
from backend.app.services.harmonic.families import AffineHarmonic, GaussianBump
from backend.app.services.harmonic.grid import GridSpec


def _assert_passed(report):
    assert report.status == ReportStatus.PASSED, [c.criterion for c in report.failed_checks]
    assert report.checks


def _check(report, criterion):
    matches = [c for c in report.checks if c.criterion == criterion]
    assert len(matches) == 1, criterion
    return matches[0]


def test_registry_covers_every_experiment():
    assert set(EXPERIMENTS) == set(EXPERIMENT_NAMES)


class TestMoments:

    def test_single_coarse_step_is_centred(self):
        displacements = coarse_displacements(2, 1, 2, initial_toss=1)
        assert displacements.shape == (1 << 4, 3)
        moments = exact_moments(displacements, 2)
        assert not moments["mean_sum"].any()

    def test_constants_are_positive(self):
        constants = moment_constants(2, 1)
        assert set(constants) == {4, 6}
        assert all(value > 0 for value in constants.values())

    def test_enumeration(self, small_config):
        report = run_experiment(small_config(experiment="moments", d=2, i=1, mode="enumeration"))
        _assert_passed(report)
        assert all(row.exact for row in report.estimates)
        assert {"C_4", "C_6"} <= set(report.derived)
        assert any(c.criterion.startswith("coarse_step_bounded") for c in report.checks)
        assert report.derived["coarse_step_bound_over_eps_N3"] == pytest.approx((2.0 / 3) ** 0.5)

    @pytest.mark.slow
    def test_montecarlo_cross_checked(self, small_config):
        report = run_experiment(small_config(experiment="moments", d=2, i=2, mode="montecarlo", paths=20000))
        assert report.total_paths == 2 * 20000
        assert any(c.criterion.startswith("montecarlo_matches_enumeration") for c in report.checks)
        assert all(row.stderr is not None for row in report.estimates)


class TestExactIdentities:

    @pytest.mark.parametrize("d", [1, 2])
    def test_cauchy_riemann(self, small_config, d):
        _assert_passed(run_experiment(small_config(experiment="cauchy_riemann", d=d)))

    def test_transform_identity(self, small_config):
        _assert_passed(run_experiment(small_config(experiment="transform_identity", d=2)))

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_operator_algebra(self, small_config, d):
        report = run_experiment(small_config(experiment="operator_algebra", d=d))
        _assert_passed(report)
        if d == 1:
            assert any(c.criterion == "riesz_equals_hilbert_d1" for c in report.checks)


class TestDeterministicOracles:

    def test_gv_identity_d1(self, small_config):
        report = run_experiment(small_config(experiment="gv_identity", d=1, L=20.0, M=256))
        _assert_passed(report)
        assert "pv_relative_error_d1" in report.derived

    def test_norm_comparison_at_two(self, small_config):
        report = run_experiment(small_config(experiment="norm_comparison", d=1, p=[2.0]))
        _assert_passed(report)
        names = {row.name for row in report.estimates}
        assert names == {"L_R", "L_S", "identity_norm"}

    def test_norm_comparison_needs_p_above_one(self, small_config):
        with pytest.raises(ConfigError):
            run_norm_comparison(small_config(experiment="norm_comparison", d=1), p=[1.0])


class TestMonteCarlo:

    def test_weak_convergence_of_constant(self, small_config):
        report = run_weak_convergence(small_config(experiment="weak_convergence", paths=500),
                                      psi=constant_observable)
        _assert_passed(report)
        gaps = [row.estimate for row in report.estimates if row.name == "gap"]
        assert gaps == [0.0, 0.0]
        assert report.total_paths == 3 * 500

    def test_affine_martingale_telescopes(self, small_config):
        cfg = small_config(experiment="martingale_approx", paths=300)
        report = run_martingale_approx(cfg, f=AffineHarmonic(0.5, [1.0, -2.0]))
        _assert_passed(report)
        assert any(c.criterion == "affine_telescoping_exact" for c in report.checks)
        assert [s.N for s in report.sweeps] == [[2, 3]]

    def test_affine_coarse_integral(self, small_config):
        cfg = small_config(experiment="martingale_approx", paths=300, coarse_integral=True)
        _assert_passed(run_martingale_approx(cfg, f=AffineHarmonic(0.0, [0.0, 1.0])))

    @pytest.mark.slow
    def test_gaussian_gap_shrinks_with_resolution(self, small_config):
        report = run_weak_convergence(small_config(experiment="weak_convergence", N=[2, 8], paths=4000))
        gaps = [row.estimate for row in report.estimates if row.name == "gap"]
        assert len(gaps) == 2 and gaps[1] < gaps[0]
        assert _check(report, "gap_decreases").passed

    @pytest.mark.slow
    def test_gaussian_martingale_stays_in_half_space(self, small_config):
        cfg = small_config(experiment="martingale_approx", d=2, N=[4], T=4.0, paths=200, substep=0.01)
        bump = GaussianBump([0.0, 0.0], grid=GridSpec(2, L=10.0, M=32))
        report = run_martingale_approx(cfg, f=bump)
        residuals = [row.estimate for row in report.estimates if row.name.startswith("residual_L")]
        assert residuals and np.all(np.isfinite(residuals))

    @pytest.mark.slow
    def test_weak_formulation_agrees(self, small_config):
        # θ(N=4) = 2^-10，子步长取其四分之一
        cfg = small_config(experiment="weak_formulation", N=[2, 4, 8], T=0.25, y=2.0, paths=400,
                           M=32, substep=2.0 ** -12)
        report = run_experiment(cfg)
        assert _check(report, "discrete_matches_continuous").passed

    @pytest.mark.slow
    def test_vector_sum_agrees_at_fine_resolution(self, small_config):
        cfg = small_config(experiment="vector", d=2, N=[4, 8, 16], T=0.25, y=2.0, paths=200,
                           M=32, substep=2.0 ** -14)
        report = run_experiment(cfg)
        assert [row.value for row in report.estimates if row.name == "discrete_sum"] == [8.0]
        assert _check(report, "vector_sum_matches").passed

    @pytest.mark.slow
    def test_weak_formulation_structure(self, small_config):
        report = run_experiment(small_config(experiment="weak_formulation", paths=400, M=32))
        names = {row.name for row in report.estimates}
        assert {"discrete_pairing", "continuous_pairing", "swapped_continuous_pairing"} <= names
        assert {c.criterion for c in report.checks} == {"discrete_matches_continuous", "swap_antisymmetry"}

    @pytest.mark.slow
    def test_vector_structure(self, small_config):
        report = run_experiment(small_config(experiment="vector", d=2, paths=200, M=32))
        assert any(c.criterion == "vector_sum_matches" for c in report.checks)
        members = {row.value for row in report.estimates if row.param == "i"}
        assert members == {1.0, 2.0}

    @pytest.mark.slow
    def test_pointwise_structure(self, small_config):
        report = run_experiment(small_config(experiment="pointwise_riesz", paths=400, y_sweep=[1.0, 2.0],
                                             probes=5, horizon=200.0))
        oracle = [row for row in report.estimates if row.name == "oracle_oriented"]
        assert len(oracle) == 5
        assert "riesz_sup_norm" in report.derived

    @pytest.mark.slow
    def test_harmonic_measure(self, small_config):
        report = run_experiment(small_config(experiment="harmonic_measure", paths=2000, horizon=1000.0))
        masses = [c for c in report.checks if c.criterion.startswith("poisson_mass_one")]
        assert len(masses) == 3 and all(c.passed for c in masses)
        assert report.derived["ks_statistic"] < 2.0 * report.derived["ks_critical"]

    @pytest.mark.slow
    def test_exit_distribution_passes_ks(self, small_config):
        report = run_experiment(small_config(experiment="harmonic_measure", paths=1000, horizon=1000.0, seed=5))
        check = _check(report, "exit_distribution_matches_poisson_kernel")
        assert check.passed, (check.observed, check.threshold)
