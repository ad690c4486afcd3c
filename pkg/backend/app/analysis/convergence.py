"""
收敛扫描的拟合与统计判据
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import STATISTICS
from ..core.exceptions import ConfigError
from ..models.experiment_models import ConvergenceSweep
from ..utils.statistics import Estimate

logger = logging.getLogger(__name__)


def loglog_slope(N: Sequence[float], values: Sequence[float],
                 stderrs: Sequence[float]) -> Tuple[Optional[float], Optional[float]]:
    """
    log(值) 对 log(N) 的加权最小二乘斜率，权重 (值/标准误)²
    非正的估计被跳过；可用点少于 2 个时返回 (None, None)
    """
    N = np.asarray(N, dtype=float)
    values = np.asarray(values, dtype=float)
    stderrs = np.asarray(stderrs, dtype=float)
    usable = values > 0
    if usable.sum() < 2:
        return None, None
    x = np.log(N[usable])
    y = np.log(values[usable])
    sigma = np.where(stderrs[usable] > 0, stderrs[usable] / values[usable], 1.0)
    weights = 1.0 / sigma ** 2
    design = np.stack([np.ones_like(x), x], axis=1)
    normal = design.T @ (weights[:, None] * design)
    covariance = np.linalg.pinv(normal)
    beta = covariance @ (design.T @ (weights * y))
    return float(beta[1]), float(math.sqrt(max(covariance[1, 1], 0.0)))


def build_sweep(label: str, N: Sequence[int], estimates: Sequence[Estimate]) -> ConvergenceSweep:
    if any(b <= a for a, b in zip(N, N[1:])):
        raise ConfigError(f"扫描的 N 必须严格递增: {list(N)}")
    values = [e.value for e in estimates]
    stderrs = [e.stderr for e in estimates]
    slope, slope_stderr = loglog_slope(N, values, stderrs)
    return ConvergenceSweep(label=label, N=list(N), estimates=values, stderrs=stderrs,
                            slope=slope, slope_stderr=slope_stderr)


def consistent_with(estimate: Estimate, target: float = 0.0, sigma: Optional[float] = None,
                    tolerance: float = 0.0) -> bool:
    """|估计 − 目标| ≤ σ 倍标准误，或不超过绝对容差"""
    sigma = STATISTICS["consistency_sigma"] if sigma is None else sigma
    gap = abs(estimate.value - target)
    return gap <= sigma * estimate.stderr or gap <= tolerance


def decrease_z_scores(estimates: Sequence[Estimate]) -> List[float]:
    """相邻两点 (前 − 后)/合并标准误"""
    scores = []
    for first, second in zip(estimates, estimates[1:]):
        difference = first - second
        scores.append(difference.z_score())
    return scores


def monotone_decrease(estimates: Sequence[Estimate], z: Optional[float] = None) -> Tuple[bool, List[float]]:
    """相邻各点在单侧 z 水平上严格下降；单点扫描视为无断言"""
    z = STATISTICS["monotone_z"] if z is None else z
    scores = decrease_z_scores(estimates)
    return all(score > z for score in scores), scores
