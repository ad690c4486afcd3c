"""
粗步条件矩

在 √(2δ) 整数单位下，一个粗步的位移只依赖上一个已消耗的抛币 s 与本步 W·d 个新抛币。
枚举模式对 2^{Wd} 个叶子精确求和（整数运算，结论与舍入无关），并与转移核动态规划比对；
蒙特卡洛模式按块抽样，并在枚举可行时与精确值做 4σ 交叉检验。
"""
import logging
from typing import Dict, List, Optional

import numpy as np

from ...config.run_config import RunConfig
from ...core.config import STATISTICS, TOLERANCES, settings
from ...models.experiment_models import ExperimentReport
from ...utils.parallel import concat_blocks, map_blocks
from ...utils.statistics import mean_estimate
from ..dyadic.core import leaf_tosses
from ..stochastics.coarse_kernel import CoarseKernel
from ..stochastics.enumeration import check_cap
from ..stochastics.rng import STREAM_MOMENTS, block_generator, sweep_stream
from ..stochastics.walks import fine_increments
from .common import new_report, walk_config

logger = logging.getLogger(__name__)

MOMENT_POWERS = (4, 6)


def coarse_displacements(d: int, i: int, window: int, initial_toss: int,
                         cap: Optional[int] = None) -> np.ndarray:
    """
    枚举一个粗步的全部整数位移

    返回:
        (2^{window·d}, d+1) int64
    """
    check_cap(window * d, cap)
    fresh = leaf_tosses(window * d)
    head = np.full((fresh.shape[0], 1), initial_toss, dtype=np.int8)
    increments = fine_increments(np.concatenate([head, fresh], axis=1), d, i, 1.0)
    return np.rint(increments.sum(axis=1)).astype(np.int64)


def exact_moments(displacements: np.ndarray, window: int) -> Dict[str, np.ndarray]:
    """
    整数叶子和给出的精确矩
    θ 在整数单位下为 window/2，故 Var/θ = 2·Σx²/(叶子数·window)
    """
    leaves = displacements.shape[0]
    sums = displacements.sum(axis=0)
    products = displacements.T @ displacements
    result = {
        "mean_sum": sums,
        "second_sum": products,
        "mean": sums / leaves,
        "var_ratio": 2.0 * np.diag(products) / (leaves * window),
        "cross": products / leaves,
    }
    for power in MOMENT_POWERS:
        absolute = np.sum(np.abs(displacements).astype(float) ** power, axis=0) / leaves
        result[f"ratio{power}"] = absolute / (window / 2.0) ** (power / 2.0)
    return result


def moment_constants(d: int, i: int, cap: Optional[int] = None) -> Dict[int, float]:
    """C_p：窗口 2 时最大矩比乘以放大系数"""
    slack = STATISTICS["moment_constant_slack"]
    constants = {}
    for power in MOMENT_POWERS:
        ratios = [exact_moments(coarse_displacements(d, i, 2, s, cap), 2)[f"ratio{power}"].max()
                  for s in (-1, 1)]
        constants[power] = slack * float(max(ratios))
    return constants


def _kernel_gap(kernel: CoarseKernel, s: int, displacements: np.ndarray) -> float:
    """转移核矩与枚举矩的最大偏差"""
    moments = kernel.moments(s, MOMENT_POWERS)
    v = displacements.astype(float)
    leaves = v.shape[0]
    gaps = [np.max(np.abs(moments["mean"] - v.sum(axis=0) / leaves)),
            np.max(np.abs(moments["second"] - v.T @ v / leaves))]
    for power in MOMENT_POWERS:
        gaps.append(np.max(np.abs(moments[f"abs{power}"] - np.sum(np.abs(v) ** power, axis=0) / leaves)))
    return float(max(gaps))


def _enumerate_point(report: ExperimentReport, cfg: RunConfig, N: int,
                     constants: Dict[int, float]) -> Dict[str, np.ndarray]:
    walk = walk_config(cfg, N)
    window, d = walk.window, cfg.d
    bound = 2.0 / window
    kernel = CoarseKernel(d, cfg.i, window)
    pooled: Dict[str, List[np.ndarray]] = {}
    report.derived[f"coarse_step_bound_over_eps_N{N}"] = walk.coarse_step_bound / walk.eps

    for s in (-1, 1):
        displacements = coarse_displacements(d, cfg.i, window, s)
        moments = exact_moments(displacements, window)
        leaves = displacements.shape[0]
        tag = f"s{s:+d}"

        report.add_check(f"conditional_mean_zero[N={N},{tag}]", not moments["mean_sum"].any(),
                         observed=float(np.max(np.abs(moments["mean"]))), threshold=0.0)
        off_diagonal = moments["second_sum"] - np.diag(np.diag(moments["second_sum"]))
        report.add_check(f"cross_moments_zero[N={N},{tag}]", not off_diagonal.any(),
                         observed=float(np.max(np.abs(off_diagonal)) / leaves), threshold=0.0)
        worst_step = int(np.max(np.abs(displacements)))
        report.add_check(f"coarse_step_bounded[N={N},{tag}]", worst_step <= window,
                         observed=worst_step, threshold=window)

        for j in range(d + 1):
            report.add_estimate("N", N, f"mean_x{j}_{tag}", moments["mean"][j], exact=True)
            report.add_estimate("N", N, f"var_ratio_x{j}_{tag}", moments["var_ratio"][j], exact=True)
            for power in MOMENT_POWERS:
                report.add_estimate("N", N, f"ratio{power}_x{j}_{tag}", moments[f"ratio{power}"][j], exact=True)
            if j >= 2:
                # 2·Σx² = window·叶子数 ⟺ Var = θ
                exact_theta = 2 * int(moments["second_sum"][j, j]) == window * leaves
                report.add_check(f"variance_equals_theta[N={N},x{j},{tag}]", exact_theta,
                                 observed=float(moments["var_ratio"][j]), threshold=1.0)
            else:
                ratio = float(moments["var_ratio"][j])
                report.add_check(f"variance_near_theta[N={N},x{j},{tag}]",
                                 1.0 - bound <= ratio <= 1.0 + bound,
                                 observed=abs(ratio - 1.0), threshold=bound)

        for power in MOMENT_POWERS:
            worst = float(moments[f"ratio{power}"].max())
            report.add_check(f"moment_ratio_bounded[N={N},p={power},{tag}]", worst <= constants[power],
                             observed=worst, threshold=constants[power])

        gap = _kernel_gap(kernel, s, displacements)
        report.add_check(f"kernel_matches_enumeration[N={N},{tag}]",
                         gap <= TOLERANCES["exact_identity"] * max(1.0, window ** 6),
                         observed=gap, threshold=TOLERANCES["exact_identity"] * max(1.0, window ** 6))

        for key in ("mean", "var_ratio", "ratio4", "ratio6"):
            pooled.setdefault(key, []).append(moments[key])
        pooled.setdefault("cross", []).append(moments["cross"])

    # s 为公平抛币，无条件矩取两种条件的平均
    return {key: 0.5 * (values[0] + values[1]) for key, values in pooled.items()}


def _monte_carlo_point(report: ExperimentReport, cfg: RunConfig, N: int, index: int,
                       exact: Optional[Dict[str, np.ndarray]]):
    walk = walk_config(cfg, N)
    window, d = walk.window, cfg.d
    stream = sweep_stream(STREAM_MOMENTS, index)

    def block(b: int, start: int, stop: int) -> Dict[str, np.ndarray]:
        rng = block_generator(cfg.seed, b, stream)
        count = stop - start
        tosses = (2 * rng.integers(0, 2, size=(count, window * d + 1), dtype=np.int8) - 1).astype(np.int8)
        x = fine_increments(tosses, d, cfg.i, 1.0).sum(axis=1)
        return {"x": x.T.copy()}

    x = concat_blocks(map_blocks(block, cfg.paths, cfg.threads))["x"].T
    scale = 2.0 / window
    sigma = STATISTICS["cross_mode_sigma"]

    samples = {}
    for j in range(d + 1):
        samples[f"mean_x{j}"] = x[:, j]
        samples[f"var_ratio_x{j}"] = scale * x[:, j] ** 2
        for power in MOMENT_POWERS:
            samples[f"ratio{power}_x{j}"] = np.abs(x[:, j]) ** power / (window / 2.0) ** (power / 2.0)
        for k in range(j + 1, d + 1):
            samples[f"cross_x{j}x{k}"] = x[:, j] * x[:, k]

    for name, values in samples.items():
        estimate = mean_estimate(values)
        report.add_estimate("N", N, name, estimate.value, stderr=estimate.stderr, paths=cfg.paths)
        if exact is None:
            continue
        if name.startswith("cross_"):
            a, b = int(name[7]), int(name[9])
            target = float(exact["cross"][a, b])
        else:
            key, j = name.rsplit("_x", 1)
            target = float(exact[key][int(j)])
        z = abs(estimate.z_score(target))
        report.add_check(f"montecarlo_matches_enumeration[N={N},{name}]", z <= sigma,
                         observed=z, threshold=sigma)
    report.total_paths += cfg.paths


def run_moment_suite(cfg: RunConfig, mode: Optional[str] = None) -> ExperimentReport:
    """
    粗步条件矩实验

    参数:
        mode: "enumeration" 或 "montecarlo"，默认取 cfg.mode
    """
    mode = cfg.mode if mode is None else mode
    report = new_report("moments", cfg)
    logger.info(f"🚀 开始矩实验: d={cfg.d}, i={cfg.i}, N={cfg.N}, 模式={mode}")

    enumeration_feasible = all(walk_config(cfg, N).window * cfg.d <= settings.ENUMERATION_CAP for N in cfg.N)
    constants = moment_constants(cfg.d, cfg.i)
    for power, value in constants.items():
        report.derived[f"C_{power}"] = value

    for index, N in enumerate(cfg.N):
        if mode == "enumeration":
            _enumerate_point(report, cfg, N, constants)
        else:
            exact = None
            if enumeration_feasible:
                exact = _enumerate_point(ExperimentReport(experiment="moments", parameters={}), cfg, N, constants)
            _monte_carlo_point(report, cfg, N, index, exact)
        logger.info(f"矩实验 N={N} 完成")

    logger.info(f"{'✅' if report.passed else '❌'} 矩实验结束: {len(report.checks)} 项断言, "
                f"失败 {len(report.failed_checks)} 项")
    return report