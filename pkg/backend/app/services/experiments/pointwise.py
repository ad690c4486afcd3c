"""
布朗出口点实验：变换鞅收益对出口点的核回归，以及出口分布（调和测度）检验
"""
import logging
import math
from typing import Dict, Optional, Sequence

import numpy as np
from scipy import integrate, special, stats

from ...analysis.convergence import consistent_with
from ...config.run_config import RunConfig
from ...models.experiment_models import ExperimentReport
from ...utils.statistics import Estimate
from ..harmonic.families import GaussianBump, GridHarmonic, HarmonicFunction
from ..harmonic.grid import riesz_transform
from ..harmonic.oracle import HALF_SPACE_ORIENTATION, harmonic_measure_cdf_1d, harmonic_measure_density
from ..martingale.engine import BrownianMartingaleObserver
from ..stochastics.rng import STREAM_BROWNIAN, sweep_stream
from .common import gaussian, grid_spec, new_report, run_brownian_blocks, unit_vector, warm_up

logger = logging.getLogger(__name__)

# 自适应步长 h = c·x₀²
ADAPTIVE_FACTOR = 0.01
# 靠近边界时的最小子步长
ADAPTIVE_FLOOR = 1e-4
# 有效样本数低于此值的探测点记为空箱
MIN_EFFECTIVE_SAMPLES = 10.0
# 逐点差距相对 ‖R_i f‖_∞ 的容许比例
POINTWISE_RELATIVE_GAP = 0.1
KS_LEVEL = 0.01


def _arrival_collect(engine, observers) -> Dict[str, np.ndarray]:
    collected = {"arrival": engine.positions[:, 1:].T.copy(), "hit": engine.hit.astype(float)}
    if observers:
        collected["payoff"] = observers[0].transformed.copy()
    return collected


def simulate_arrivals(cfg: RunConfig, y: float, paths: int, stream: int,
                      f: Optional[HarmonicFunction] = None, i: Optional[int] = None) -> Dict[str, np.ndarray]:
    """
    从 (y, 0) 出发的自适应步长布朗运动，直到命中或到达 cfg.horizon

    返回:
        {"arrival": (P, d), "hit": (P,) 布尔, "payoff": (P,) 变换鞅 M^{y,i}（给出 f 时）}
    """
    start = np.zeros(cfg.d + 1)
    start[0] = y
    floor = cfg.substep if cfg.substep is not None else ADAPTIVE_FLOOR
    make = (lambda: [BrownianMartingaleObserver(f, i)]) if f is not None else (lambda: [])
    result = run_brownian_blocks(start, cfg.horizon, floor, paths, cfg.seed, make, _arrival_collect,
                                 bridge=cfg.bridge, adaptive=ADAPTIVE_FACTOR, stream=stream,
                                 threads=cfg.threads)
    result["arrival"] = result["arrival"].T
    result["hit"] = result["hit"] > 0.5
    return result


def kernel_regression(arrival: np.ndarray, payoff: np.ndarray, probes: np.ndarray,
                      bandwidth: float) -> Dict[str, np.ndarray]:
    """
    Nadaraya–Watson 回归 E[payoff | arrival = probe]，高斯核

    返回:
        {"estimate", "stderr", "effective"}，各为 (探测点数,)
    """
    distance2 = np.sum((arrival[:, None, :] - probes[None, :, :]) ** 2, axis=-1)
    weights = np.exp(-distance2 / (2.0 * bandwidth ** 2))
    total = weights.sum(axis=0)
    squares = np.sum(weights ** 2, axis=0)
    safe = np.where(total > 0, total, 1.0)
    estimate = np.where(total > 0, weights.T @ payoff / safe, 0.0)
    residual2 = (payoff[:, None] - estimate[None, :]) ** 2
    stderr = np.where(total > 0, np.sqrt(np.sum(weights ** 2 * residual2, axis=0)) / safe, 0.0)
    effective = np.where(squares > 0, total ** 2 / np.where(squares > 0, squares, 1.0), 0.0)
    return {"estimate": estimate, "stderr": stderr, "effective": effective}


def _riesz_oracle(f: HarmonicFunction, i: int, probes: np.ndarray, cfg: RunConfig):
    """(探测点上的 −R_i f, ‖R_i f‖_∞)"""
    if f.d == 1 and isinstance(f, GaussianBump):
        dense = np.linspace(-cfg.L / 2.0, cfg.L / 2.0, 4001)
        return (HALF_SPACE_ORIENTATION * f.hilbert_boundary(probes[:, 0]),
                float(np.max(np.abs(f.hilbert_boundary(dense)))))
    transformed = riesz_transform(f.to_grid(grid_spec(cfg, f.d)), i)
    boundary = np.concatenate([np.zeros((probes.shape[0], 1)), probes], axis=1)
    values = GridHarmonic(transformed, method="trig").value(boundary)
    return HALF_SPACE_ORIENTATION * values, float(np.max(np.abs(transformed.values)))


def run_pointwise_riesz(cfg: RunConfig, f: Optional[HarmonicFunction] = None, i: Optional[int] = None,
                        y_sweep: Optional[Sequence[float]] = None, bandwidth: Optional[float] = None,
                        paths: Optional[int] = None) -> ExperimentReport:
    """
    E[M_∞^{y,i} | 出口点 = x] 的核回归，与 −R_i f(x) 比较；y 扫描展示极限趋势
    """
    i = cfg.i if i is None else i
    f = f or gaussian(cfg.d, np.zeros(cfg.d), grid_spec(cfg))
    y_sweep = list(cfg.y_sweep if y_sweep is None else y_sweep)
    bandwidth = cfg.bandwidth if bandwidth is None else bandwidth
    paths = cfg.paths if paths is None else paths
    warm_up([f], cfg.d)
    report = new_report("pointwise_riesz", cfg)
    logger.info(f"🚀 开始逐点黎兹实验: d={cfg.d}, i={i}, y={y_sweep}, 带宽={bandwidth}, 路径数={paths}")

    probes = np.outer(np.linspace(-2.0, 2.0, cfg.probes), unit_vector(cfg.d, i))
    oracle, sup_norm = _riesz_oracle(f, i, probes, cfg)
    center = int(np.argmin(np.abs(probes[:, i - 1])))
    report.derived["riesz_sup_norm"] = sup_norm
    for k, x in enumerate(probes[:, i - 1]):
        report.add_estimate("x", x, "oracle_oriented", oracle[k], exact=True)

    gaps = []
    for index, y in enumerate(sorted(y_sweep)):
        result = simulate_arrivals(cfg, y, paths, sweep_stream(STREAM_BROWNIAN, index), f, i)
        report.total_paths += paths
        hit = result["hit"]
        report.derived[f"censored_fraction_y{y:g}"] = float(1.0 - hit.mean())
        arrival, payoff = result["arrival"][hit], result["payoff"][hit]

        fit = kernel_regression(arrival, payoff, probes, bandwidth)
        wide = kernel_regression(arrival, payoff, probes, 2.0 * bandwidth)
        usable = fit["effective"] >= MIN_EFFECTIVE_SAMPLES
        for k, x in enumerate(probes[:, i - 1]):
            report.add_estimate("x", x, f"conditional_payoff_y{y:g}", fit["estimate"][k],
                                stderr=fit["stderr"][k], paths=int(hit.sum()))
            if not usable[k]:
                report.derived[f"empty_bin_y{y:g}_x{x:g}"] = 1.0
                logger.warning(f"⚠️ y={y:g}, x={x:g}: 有效样本 {fit['effective'][k]:.1f}，记为空箱")

        gap = float(np.max(np.abs(fit["estimate"] - oracle)[usable])) if usable.any() else float("inf")
        gaps.append(gap)
        if math.isfinite(gap):
            report.derived[f"sup_gap_y{y:g}"] = gap
        report.derived[f"bandwidth_doubling_change_y{y:g}"] = \
            float(np.max(np.abs(fit["estimate"] - wide["estimate"])[usable])) if usable.any() else 0.0

        if usable[center]:
            at_center = Estimate(float(fit["estimate"][center]), float(fit["stderr"][center]), int(hit.sum()))
            report.add_check(f"center_probe_matches_oracle[y={y:g}]",
                             consistent_with(at_center, float(oracle[center])),
                             observed=abs(at_center.value - float(oracle[center])),
                             threshold=3.0 * at_center.stderr)
        logger.info(f"y={y:g}: 逐点最大差距 {gap:.4f}")

    if len(gaps) >= 2 and all(math.isfinite(g) for g in gaps):
        report.derived["sup_gap_trend"] = gaps[-1] - gaps[0]
    if cfg.d == 1:
        threshold = POINTWISE_RELATIVE_GAP * sup_norm
        report.add_check("sup_gap_below_tolerance", gaps[-1] < threshold,
                         observed=gaps[-1] if math.isfinite(gaps[-1]) else None, threshold=threshold,
                         detail=f"y={max(y_sweep):g}")

    logger.info(f"{'✅' if report.passed else '❌'} 逐点黎兹实验结束")
    return report


def radial_cdf(y: float, r: np.ndarray, d: int) -> np.ndarray:
    """出口点到原点距离 |X| 的分布函数"""
    r = np.asarray(r, dtype=float)
    if d == 1:
        return 2.0 / math.pi * np.arctan(r / y)
    if d == 2:
        return 1.0 - y / np.sqrt(y * y + r * r)
    if d == 3:
        return 2.0 / math.pi * (np.arctan(r / y) - y * r / (y * y + r * r))
    raise ValueError(f"不支持的维数 d={d}")


def _sphere_area(d: int) -> float:
    """ℝ^d 中单位球面的面积（d = 1 时为 2）"""
    return 2.0 * math.pi ** (d / 2.0) / special.gamma(d / 2.0)


def harmonic_measure_mass(y: float, d: int) -> float:
    """∫ P_y = 1 的数值检查"""
    area = _sphere_area(d)
    mass, _ = integrate.quad(lambda r: area * r ** (d - 1) * float(harmonic_measure_density(y, np.array([r] + [0.0] * (d - 1)), d)),
                             0.0, np.inf, limit=200)
    return mass


def ks_sub_distribution(samples: np.ndarray, total: int, cdf) -> Dict[str, float]:
    """
    删失样本的 KS 统计量：经验子分布 (#样本 ≤ x)/总路径数 与目标分布比较，
    下侧偏差扣除删失比例

    返回:
        {"statistic", "upper", "lower", "censored", "critical"}
    """
    ordered = np.sort(samples)
    count = ordered.size
    censored = 1.0 - count / total
    target = cdf(ordered)
    after = np.arange(1, count + 1) / total
    before = np.arange(0, count) / total
    upper = float(np.max(after - target, initial=0.0))
    lower = float(np.max(target - before, initial=0.0))
    lower = max(lower, float(1.0 - count / total))
    statistic = max(upper, lower - censored)
    critical = float(stats.kstwo.ppf(1.0 - KS_LEVEL, total))
    return {"statistic": statistic, "upper": upper, "lower": lower,
            "censored": censored, "critical": critical}


def run_harmonic_measure(cfg: RunConfig, y: Optional[float] = None,
                         paths: Optional[int] = None) -> ExperimentReport:
    """
    布朗出口点与泊松核的分布比较：d = 1 用带符号坐标，d ≥ 2 用到原点的距离
    """
    y = cfg.y if y is None else y
    paths = cfg.paths if paths is None else paths
    report = new_report("harmonic_measure", cfg)
    logger.info(f"🚀 开始调和测度实验: d={cfg.d}, y={y}, 路径数={paths}")

    for height in (0.5, 1.0, 4.0):
        mass = harmonic_measure_mass(height, cfg.d)
        report.add_estimate("y", height, "poisson_mass", mass, exact=True)
        report.add_check(f"poisson_mass_one[y={height:g}]", abs(mass - 1.0) <= 1e-8,
                         observed=abs(mass - 1.0), threshold=1e-8)
    origin = float(harmonic_measure_density(y, np.zeros(cfg.d), cfg.d))
    report.derived["density_at_origin"] = origin

    result = simulate_arrivals(cfg, y, paths, STREAM_BROWNIAN)
    report.total_paths += paths
    arrival = result["arrival"][result["hit"]]
    if cfg.d == 1:
        samples, cdf = arrival[:, 0], lambda x: harmonic_measure_cdf_1d(y, x)
    else:
        samples, cdf = np.sqrt(np.sum(arrival ** 2, axis=1)), lambda r: radial_cdf(y, r, cfg.d)

    ks = ks_sub_distribution(samples, paths, cdf)
    for key, value in ks.items():
        report.derived[f"ks_{key}"] = value
    report.add_check("exit_distribution_matches_poisson_kernel", ks["statistic"] <= ks["critical"],
                     observed=ks["statistic"], threshold=ks["critical"])

    logger.info(f"{'✅' if report.passed else '❌'} 调和测度实验结束: KS={ks['statistic']:.4f}, "
                f"临界值={ks['critical']:.4f}, 删失比例={ks['censored']:.4f}")
    return report
