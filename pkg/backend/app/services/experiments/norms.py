"""
L^p 范数比较：网格黎兹变换与二进黎兹变换的可验证下界
"""
import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from ...analysis.operator_norms import power_iteration
from ...config.run_config import RunConfig
from ...core.config import TOLERANCES
from ...core.exceptions import ConfigError
from ...models.experiment_models import ExperimentReport
from ..dyadic.core import DyadicInterval
from ..dyadic.haar_ops import (
    HaarCoefficients,
    identity_operator,
    operator_norm_estimate,
    reconstruct,
    riesz_operator,
    riesz_vector_norm_estimate,
)
from ..harmonic.grid import GridFunction, GridSpec, riesz_transform
from .common import grid_spec, new_report

logger = logging.getLogger(__name__)

# p = 2 时两侧下界的容差
GRID_PARSEVAL_TOLERANCE = 1e-3
DYADIC_PARSEVAL_TOLERANCE = 1e-6


def _grid_start(spec: GridSpec, i: int) -> np.ndarray:
    """沿 e_i 的最低频平面波"""
    return np.cos(spec.lowest_frequency * spec.mesh()[i - 1]).reshape(-1)


def grid_riesz_norm(spec: GridSpec, i: int, p: float, restarts: int = 8,
                    iterations: int = 50, seed: int = 0) -> float:
    """‖R_i‖_{p→p} 在网格函数上的下界（R_i 的转置为 −R_i）"""

    def apply(x: np.ndarray) -> np.ndarray:
        return riesz_transform(GridFunction(spec, x.reshape(spec.shape)), i).values.reshape(-1)

    found = power_iteration(apply, lambda y: -apply(y), spec.M ** spec.d, p,
                            starts=[_grid_start(spec, i)], restarts=restarts,
                            iterations=iterations, seed=seed)
    return found["ratio"]


def grid_riesz_vector_norm(spec: GridSpec, p: float, restarts: int = 8,
                           iterations: int = 50, seed: int = 0) -> float:
    """‖(R_1, …, R_d)‖_{p→p} 的下界，输出取逐点 ℓ² 范数"""

    def component(x: np.ndarray, j: int) -> np.ndarray:
        return riesz_transform(GridFunction(spec, x.reshape(spec.shape)), j).values.reshape(-1)

    def apply(x: np.ndarray) -> np.ndarray:
        return np.stack([component(x, j) for j in range(1, spec.d + 1)], axis=1)

    def adjoint(y: np.ndarray) -> np.ndarray:
        return -sum(component(y[:, j - 1], j) for j in range(1, spec.d + 1))

    found = power_iteration(apply, adjoint, spec.M ** spec.d, p,
                            starts=[_grid_start(spec, 1)], restarts=restarts,
                            iterations=iterations, seed=seed)
    return found["ratio"]


def slice_starts(i: int, depth: int) -> List[np.ndarray]:
    """每个深度上切片 i 首代的哈尔函数，作为确定性初值"""
    return [reconstruct(HaarCoefficients.basis(level, DyadicInterval(i, 0))).values[:, 0]
            for level in range(i + 1, depth + 1)]


def run_norm_comparison(cfg: RunConfig, p: Optional[Sequence[float]] = None,
                        depth: Optional[int] = None, spec: Optional[GridSpec] = None) -> ExperimentReport:
    """
    L_R：网格上 ‖R_i f‖_p/‖f‖_p 的最大化；L_S：系数树上 ‖S_i f‖_p/‖f‖_p 的最大化。
    两者使用相同的重启次数与迭代次数，断言 L_S ≥ L_R − 松弛量
    """
    p = list(cfg.p if p is None else p)
    if any(q <= 1.0 for q in p):
        raise ConfigError(f"范数比较要求每个 p > 1，当前 {p}")
    depth = cfg.depth if depth is None else depth
    spec = spec or grid_spec(cfg)
    slack = TOLERANCES["norm_slack"]
    budget = {"restarts": cfg.restarts, "iterations": cfg.iterations, "seed": cfg.seed}
    report = new_report("norm_comparison", cfg)
    logger.info(f"🚀 开始范数比较: d={cfg.d}, i={cfg.i}, p={p}, 深度={depth}, "
                f"{'向量形式' if cfg.vector else '单分量'}")

    for q in p:
        if cfg.vector:
            lower_r = grid_riesz_vector_norm(spec, q, **budget)
            lower_s = riesz_vector_norm_estimate(cfg.d, q, depth, **budget)
        else:
            lower_r = grid_riesz_norm(spec, cfg.i, q, **budget)
            lower_s = operator_norm_estimate(riesz_operator(cfg.i, cfg.d), q, depth,
                                             starts=slice_starts(cfg.i, depth), **budget)
        identity = operator_norm_estimate(identity_operator, q, min(depth, 4), **budget)

        report.add_estimate("p", q, "L_R", lower_r, exact=True)
        report.add_estimate("p", q, "L_S", lower_s, exact=True)
        report.add_estimate("p", q, "identity_norm", identity, exact=True)
        report.derived[f"L_S_minus_L_R_p{q:g}"] = lower_s - lower_r

        report.add_check(f"dyadic_dominates[p={q:g}]", lower_s >= lower_r - slack,
                         observed=lower_s - lower_r, threshold=-slack)
        report.add_check(f"identity_norm_one[p={q:g}]", abs(identity - 1.0) <= DYADIC_PARSEVAL_TOLERANCE,
                         observed=abs(identity - 1.0), threshold=DYADIC_PARSEVAL_TOLERANCE)
        if math.isclose(q, 2.0):
            report.add_check("grid_parseval", abs(lower_r - 1.0) <= GRID_PARSEVAL_TOLERANCE,
                             observed=abs(lower_r - 1.0), threshold=GRID_PARSEVAL_TOLERANCE)
            report.add_check("dyadic_parseval", abs(lower_s - 1.0) <= DYADIC_PARSEVAL_TOLERANCE,
                             observed=abs(lower_s - 1.0), threshold=DYADIC_PARSEVAL_TOLERANCE)
        logger.info(f"p={q:g}: L_R={lower_r:.6f}, L_S={lower_s:.6f}")

    logger.info(f"{'✅' if report.passed else '❌'} 范数比较结束")
    return report
