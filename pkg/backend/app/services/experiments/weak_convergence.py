"""
弱收敛与鞅逼近扫描
"""
import logging
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ...analysis.convergence import build_sweep, consistent_with, monotone_decrease
from ...config.run_config import RunConfig
from ...core.config import STATISTICS, TOLERANCES
from ...models.experiment_models import ExperimentReport
from ...utils.statistics import Estimate, gap_estimate, lp_norm_estimate, mean_estimate
from ..harmonic.families import AffineHarmonic, HarmonicFunction, PlaneWave
from ..martingale.engine import CoarseMartingaleObserver, FineMartingaleObserver
from ..stochastics.rng import STREAM_COARSE_WALK, STREAM_FINE_WALK, sweep_stream
from .common import (
    brownian_substep,
    brownian_terminal,
    finite,
    new_report,
    run_brownian_blocks,
    run_walk_blocks,
    stopped_terminal,
    unit_vector,
    walk_config,
    warm_up,
)

logger = logging.getLogger(__name__)

Observable = Callable[[np.ndarray], np.ndarray]


def gaussian_observable(center: np.ndarray, width: float = 1.0) -> Observable:
    """ψ(x) = exp(−|x − c|²/(2σ²))，作用于 (P, d+1) 位置"""
    center = np.asarray(center, dtype=float)

    def psi(points: np.ndarray) -> np.ndarray:
        return np.exp(-np.sum((points - center) ** 2, axis=-1) / (2.0 * width ** 2))
    return psi


def constant_observable(points: np.ndarray) -> np.ndarray:
    return np.ones(points.shape[0])


def default_plane_wave(d: int) -> PlaneWave:
    return PlaneWave(unit_vector(d, 1), phase=0.3)


def _brownian_reference(cfg: RunConfig, paths: int) -> np.ndarray:
    """W_{T∧τ}，形状 (P, d+1)"""
    start = walk_config(cfg, cfg.N[0]).start
    result = run_brownian_blocks(start, cfg.T, brownian_substep(cfg), paths, cfg.seed,
                                 lambda: [], brownian_terminal, bridge=cfg.bridge, threads=cfg.threads)
    return result["terminal"].T


def run_weak_convergence(cfg: RunConfig, psi: Optional[Observable] = None,
                         N: Optional[Sequence[int]] = None,
                         paths: Optional[int] = None) -> ExperimentReport:
    """
    gap(N) = |Eψ(X_T^{τ_ε}) − Eψ(W_{T∧τ})|，粗游走按精确转移核抽样

    参数:
        psi: 作用于终点位置的有界光滑函数，默认以起点为中心的高斯
    """
    N = list(cfg.N if N is None else N)
    paths = cfg.paths if paths is None else paths
    report = new_report("weak_convergence", cfg)
    psi = psi or gaussian_observable(walk_config(cfg, N[0]).start)
    logger.info(f"🚀 开始弱收敛实验: d={cfg.d}, i={cfg.i}, N={N}, 路径数={paths}")

    reference = psi(_brownian_reference(cfg, paths))
    brownian_mean = mean_estimate(reference)
    report.add_estimate("N", 0, "brownian_mean", brownian_mean.value, stderr=brownian_mean.stderr, paths=paths)

    gaps: List[Estimate] = []
    for index, n in enumerate(N):
        walk = walk_config(cfg, n)
        terminal = run_walk_blocks(walk, paths, cfg.seed, lambda: [], stopped_terminal,
                                   stream=sweep_stream(STREAM_COARSE_WALK, index),
                                   threads=cfg.threads)["terminal"].T
        values = psi(terminal)
        walk_mean = mean_estimate(values)
        gap = gap_estimate(values, reference).magnitude
        gaps.append(gap)
        report.add_estimate("N", n, "walk_mean", walk_mean.value, stderr=walk_mean.stderr, paths=paths)
        report.add_estimate("N", n, "gap", gap.value, stderr=gap.stderr, paths=paths)
        report.total_paths += paths
        logger.info(f"N={n}: gap={gap.value:.3e} ± {gap.stderr:.1e}")
    report.total_paths += paths

    sweep = build_sweep("gap", N, gaps)
    report.sweeps.append(sweep)
    if sweep.slope is not None:
        report.derived["gap_slope"] = sweep.slope

    if len(N) >= 2:
        decreased = gaps[-1].value < gaps[0].value or gaps[-1].value == gaps[0].value == 0.0
        report.add_check("gap_decreases", decreased,
                         observed=gaps[-1].value, threshold=gaps[0].value,
                         detail=f"gap(N={N[-1]}) < gap(N={N[0]})")
    report.add_check("gap_consistent_with_zero", consistent_with(gaps[-1], 0.0, tolerance=TOLERANCES["exact_identity"]),
                     observed=gaps[-1].value, threshold=3.0 * gaps[-1].stderr,
                     detail=f"N={N[-1]}")

    logger.info(f"{'✅' if report.passed else '❌'} 弱收敛实验结束")
    return report


def _martingale_collect(f: HarmonicFunction):
    def collect(engine, observers) -> Dict[str, np.ndarray]:
        observer = observers[0]
        terminal = engine.positions[0]
        return {"residual": f.value(terminal) - observer.plain[0], "plain": observer.plain[0].copy()}
    return collect


def run_martingale_approx(cfg: RunConfig, f: Optional[HarmonicFunction] = None,
                          N: Optional[Sequence[int]] = None, p: Optional[Sequence[float]] = None,
                          paths: Optional[int] = None) -> ExperimentReport:
    """
    ‖f(X_T) − M_T^{(i),f}‖_p 随 N 的变化，并比较 E|M_T^f|^p 与 E|f(W_{T∧τ})|^p

    默认逐细步累加鞅和；cfg.coarse_integral 时改用粗步积分
    """
    N = list(cfg.N if N is None else N)
    p = list(cfg.p if p is None else p)
    paths = cfg.paths if paths is None else paths
    f = f or default_plane_wave(cfg.d)
    warm_up([f], cfg.d)
    report = new_report("martingale_approx", cfg)
    fine = not cfg.coarse_integral
    logger.info(f"🚀 开始鞅逼近实验: d={cfg.d}, i={cfg.i}, N={N}, p={p}, "
                f"{'细步和' if fine else '粗步积分'}")

    reference = f.value(_brownian_reference(cfg, paths))
    report.total_paths += paths

    residuals: Dict[float, List[Estimate]] = {q: [] for q in p}
    worst_residual = 0.0
    for index, n in enumerate(N):
        walk = walk_config(cfg, n)
        if fine:
            make = lambda: [FineMartingaleObserver(f)]
            stream = sweep_stream(STREAM_FINE_WALK, index)
        else:
            make = lambda: [CoarseMartingaleObserver(f)]
            stream = sweep_stream(STREAM_COARSE_WALK, index)
        result = run_walk_blocks(walk, paths, cfg.seed, make, _martingale_collect(f),
                                 fine=fine, stream=stream, threads=cfg.threads)
        report.total_paths += paths
        worst_residual = max(worst_residual, float(np.max(np.abs(result["residual"]))))

        for q in p:
            residual = lp_norm_estimate(result["residual"], q)
            residuals[q].append(residual)
            report.add_estimate("N", n, f"residual_L{q:g}", residual.value, stderr=residual.stderr, paths=paths)
            moment_gap = gap_estimate(np.abs(result["plain"]) ** q, np.abs(reference) ** q)
            report.add_estimate("N", n, f"moment_gap_p{q:g}", moment_gap.value,
                                stderr=moment_gap.stderr, paths=paths)
        logger.info(f"N={n}: 残差 " + ", ".join(f"L{q:g}={residuals[q][-1].value:.3e}" for q in p))

    for q in p:
        sweep = build_sweep(f"residual_L{q:g}", N, residuals[q])
        report.sweeps.append(sweep)
        if sweep.slope is not None:
            report.derived[f"residual_L{q:g}_slope"] = sweep.slope
        if len(N) >= 2 and not isinstance(f, AffineHarmonic):
            decreasing, scores = monotone_decrease(residuals[q])
            report.add_check(f"residual_decreasing[p={q:g}]", decreasing, observed=finite(min(scores)),
                             threshold=STATISTICS["monotone_z"],
                             detail="相邻 N 的单侧 z 分数")

    if isinstance(f, AffineHarmonic):
        report.add_check("affine_telescoping_exact", worst_residual <= TOLERANCES["exact_identity"],
                         observed=worst_residual, threshold=TOLERANCES["exact_identity"])

    logger.info(f"{'✅' if report.passed else '❌'} 鞅逼近实验结束")
    return report
