"""
验证实验模块
每个实验接收 RunConfig，返回 ExperimentReport
"""
import logging
from typing import Callable, Dict

from ...config.run_config import EXPERIMENT_NAMES, RunConfig
from ...core.exceptions import ConfigError
from ...models.experiment_models import ExperimentReport
from .identities import run_cauchy_riemann, run_operator_algebra, run_transform_identity
from .moments import run_moment_suite
from .norms import run_norm_comparison
from .pairings import run_gv_identity, run_vector_experiment, run_weak_formulation
from .pointwise import run_harmonic_measure, run_pointwise_riesz
from .weak_convergence import run_martingale_approx, run_weak_convergence

logger = logging.getLogger(__name__)

EXPERIMENTS: Dict[str, Callable[[RunConfig], ExperimentReport]] = {
    "moments": run_moment_suite,
    "weak_convergence": run_weak_convergence,
    "martingale_approx": run_martingale_approx,
    "weak_formulation": run_weak_formulation,
    "gv_identity": run_gv_identity,
    "norm_comparison": run_norm_comparison,
    "vector": run_vector_experiment,
    "pointwise_riesz": run_pointwise_riesz,
    "cauchy_riemann": run_cauchy_riemann,
    "transform_identity": run_transform_identity,
    "operator_algebra": run_operator_algebra,
    "harmonic_measure": run_harmonic_measure,
}

assert set(EXPERIMENTS) == set(EXPERIMENT_NAMES)


def run_experiment(cfg: RunConfig) -> ExperimentReport:
    """按 cfg.experiment 分派"""
    runner = EXPERIMENTS.get(cfg.experiment)
    if runner is None:
        raise ConfigError(f"未知实验: {cfg.experiment}")
    return runner(cfg)


__all__ = [
    'EXPERIMENTS',
    'run_experiment',
    'run_moment_suite',
    'run_weak_convergence',
    'run_martingale_approx',
    'run_weak_formulation',
    'run_gv_identity',
    'run_norm_comparison',
    'run_vector_experiment',
    'run_pointwise_riesz',
    'run_cauchy_riemann',
    'run_transform_identity',
    'run_operator_algebra',
    'run_harmonic_measure',
]
