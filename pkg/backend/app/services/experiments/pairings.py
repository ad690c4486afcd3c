"""
配对实验：离散/连续弱形式、游走族向量表示与加权半空间恒等式
"""
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import integrate

from ...analysis.convergence import consistent_with
from ...config.run_config import RunConfig
from ...core.config import TOLERANCES
from ...core.exceptions import NonDecayingInputError
from ...models.experiment_models import ExperimentReport
from ...utils.statistics import gap_estimate, mean_estimate
from ..dyadic.haar_ops import riesz_vector_norm_estimate
from ..harmonic.families import GaussianBump, HarmonicFunction
from ..harmonic.grid import GridSpec
from ..harmonic.oracle import (
    HALF_SPACE_ORIENTATION,
    grid_riesz_pairing,
    gundy_varopoulos_pairing,
    line_hilbert_quadrature_1d,
    periodic_hilbert_quadrature_1d,
)
from ..martingale.engine import BrownianPairingObserver, CoarsePairingObserver, FineMartingaleObserver
from ..stochastics.rng import STREAM_BROWNIAN, STREAM_BROWNIAN_SWAPPED, STREAM_FINE_WALK
from .common import (
    PAIR_OFFSET,
    brownian_substep,
    default_pair,
    gaussian,
    grid_spec,
    middle_resolution,
    new_report,
    relative_error,
    run_brownian_blocks,
    run_walk_blocks,
    sample_stride,
    unit_vector,
    walk_config,
    warm_up,
)

logger = logging.getLogger(__name__)


def _oriented_grid_pairing(f: HarmonicFunction, g: HarmonicFunction, i: int) -> Optional[float]:
    """−⟨R_i f, g⟩；输入不衰减时返回 None"""
    try:
        return HALF_SPACE_ORIENTATION * grid_riesz_pairing(f, g, i)
    except NonDecayingInputError:
        logger.warning("⚠️ 测试函数不衰减，跳过网格配对参考值")
        return None


def _pairing_collect(engine, observers) -> Dict[str, np.ndarray]:
    return {"pairing": observers[0].pairing.copy()}


def _brownian_pairing(cfg: RunConfig, f: HarmonicFunction, g: Sequence[HarmonicFunction],
                      slices: Sequence[int], theta: float, paths: int, stream: int) -> np.ndarray:
    """(成员数, P) 的连续配对黎曼和，采样间隔与 θ 一致"""
    substep = brownian_substep(cfg)
    start = walk_config(cfg, cfg.N[0]).start
    result = run_brownian_blocks(start, cfg.T, substep, paths, cfg.seed,
                                 lambda: [BrownianPairingObserver(f, g, slices)], _pairing_collect,
                                 bridge=cfg.bridge, sample_every=sample_stride(theta, substep),
                                 stream=stream, threads=cfg.threads)
    return result["pairing"]


def run_weak_formulation(cfg: RunConfig, f: Optional[HarmonicFunction] = None,
                         g: Optional[HarmonicFunction] = None, N: Optional[int] = None,
                         paths: Optional[int] = None) -> ExperimentReport:
    """
    固定 (y, T) 下的离散配对 E Σ_{n<n_ε} ⟨A_i∇f(X_n), ∇g(X_n)⟩θ
    与连续配对 E ∫₀^{T∧τ} ⟨A_i∇f(W), ∇g(W)⟩dt 的比较
    """
    default_f, default_g = default_pair(cfg)
    f = f or default_f
    g = g or default_g
    N = middle_resolution(cfg) if N is None else N
    paths = cfg.paths if paths is None else paths
    warm_up([f, g], cfg.d)
    walk = walk_config(cfg, N)
    report = new_report("weak_formulation", cfg)
    logger.info(f"🚀 开始弱形式实验: d={cfg.d}, i={cfg.i}, N={N}, 路径数={paths}")

    discrete_samples = run_walk_blocks(walk, paths, cfg.seed, lambda: [CoarsePairingObserver(f, [g])],
                                       _pairing_collect, threads=cfg.threads)["pairing"][0]
    continuous_samples = _brownian_pairing(cfg, f, [g], [cfg.i], walk.theta, paths, STREAM_BROWNIAN)[0]
    swapped_samples = _brownian_pairing(cfg, g, [f], [cfg.i], walk.theta, paths, STREAM_BROWNIAN_SWAPPED)[0]
    report.total_paths += 3 * paths

    discrete = mean_estimate(discrete_samples)
    continuous = mean_estimate(continuous_samples)
    swapped = mean_estimate(swapped_samples)
    for name, estimate in (("discrete_pairing", discrete), ("continuous_pairing", continuous),
                           ("swapped_continuous_pairing", swapped)):
        report.add_estimate("N", N, name, estimate.value, stderr=estimate.stderr, paths=paths)

    gap = gap_estimate(discrete_samples, continuous_samples)
    report.derived["discrete_minus_continuous"] = gap.value
    report.add_check("discrete_matches_continuous", consistent_with(gap, 0.0),
                     observed=abs(gap.value), threshold=3.0 * gap.stderr)
    antisymmetry = continuous + swapped
    report.derived["swap_sum"] = antisymmetry.value
    report.add_check("swap_antisymmetry", consistent_with(antisymmetry, 0.0),
                     observed=abs(antisymmetry.value), threshold=3.0 * antisymmetry.stderr)

    target = _oriented_grid_pairing(f, g, cfg.i)
    if target is not None:
        report.add_estimate("N", N, "grid_pairing_oriented", target, exact=True)

    if cfg.product_form:
        def collect(engine, observers):
            observer = observers[0]
            return {"product": observer.transformed[0] * (observer.test[0] - float(g.value(walk.start)))}
        product = run_walk_blocks(walk, paths, cfg.seed, lambda: [FineMartingaleObserver(f, [g])], collect,
                                  fine=True, stream=STREAM_FINE_WALK, threads=cfg.threads)["product"]
        estimate = mean_estimate(product)
        report.add_estimate("N", N, "product_form", estimate.value, stderr=estimate.stderr, paths=paths)
        report.total_paths += paths

    logger.info(f"{'✅' if report.passed else '❌'} 弱形式实验结束: 离散={discrete.value:.6g}, "
                f"连续={continuous.value:.6g}")
    return report


def default_vector_family(cfg: RunConfig):
    spec = grid_spec(cfg)
    f = gaussian(cfg.d, np.zeros(cfg.d), spec)
    g_list = [gaussian(cfg.d, unit_vector(cfg.d, i, PAIR_OFFSET), spec) for i in range(1, cfg.d + 1)]
    return f, g_list


def run_vector_experiment(cfg: RunConfig, f: Optional[HarmonicFunction] = None,
                          g_list: Optional[Sequence[HarmonicFunction]] = None, N: Optional[int] = None,
                          paths: Optional[int] = None) -> ExperimentReport:
    """
    共享抛币的游走族：成员 i 的竖直分量取自切片 i，水平分量在停止前完全相同。
    Σ_i 离散配对与同一布朗路径上的 Σ_i 连续配对比较
    """
    default_f, default_g = default_vector_family(cfg)
    f = f or default_f
    g_list = list(g_list) if g_list is not None else default_g
    N = middle_resolution(cfg) if N is None else N
    paths = cfg.paths if paths is None else paths
    slices = list(range(1, cfg.d + 1))
    warm_up([f, *g_list], cfg.d)
    walk = walk_config(cfg, N)
    report = new_report("vector", cfg)
    logger.info(f"🚀 开始向量实验: d={cfg.d}, N={N}, 路径数={paths}")

    discrete = run_walk_blocks(walk, paths, cfg.seed, lambda: [CoarsePairingObserver(f, g_list)],
                               _pairing_collect, fine=True, slices=slices, threads=cfg.threads)["pairing"]
    continuous = _brownian_pairing(cfg, f, g_list, slices, walk.theta, paths, STREAM_BROWNIAN)
    report.total_paths += 2 * paths

    for member, i in enumerate(slices):
        for name, samples in (("discrete_pairing", discrete[member]), ("continuous_pairing", continuous[member])):
            estimate = mean_estimate(samples)
            report.add_estimate("i", i, name, estimate.value, stderr=estimate.stderr, paths=paths)

    total_discrete = discrete.sum(axis=0)
    total_continuous = continuous.sum(axis=0)
    for name, samples in (("discrete_sum", total_discrete), ("continuous_sum", total_continuous)):
        estimate = mean_estimate(samples)
        report.add_estimate("N", N, name, estimate.value, stderr=estimate.stderr, paths=paths)

    gap = gap_estimate(total_discrete, total_continuous)
    report.derived["discrete_minus_continuous"] = gap.value
    report.add_check("vector_sum_matches", consistent_with(gap, 0.0),
                     observed=abs(gap.value), threshold=3.0 * gap.stderr)

    oriented = [_oriented_grid_pairing(f, g, i) for g, i in zip(g_list, slices)]
    if all(value is not None for value in oriented):
        report.add_estimate("N", N, "grid_sum_oriented", float(sum(oriented)), exact=True)

    for q in cfg.p:
        if q > 1.0:
            bound = riesz_vector_norm_estimate(cfg.d, q, cfg.depth, restarts=cfg.restarts,
                                               iterations=cfg.iterations, seed=cfg.seed)
            report.derived[f"dyadic_vector_norm_p{q:g}"] = bound

    logger.info(f"{'✅' if report.passed else '❌'} 向量实验结束")
    return report


def _pv_pairing_1d(f: GaussianBump, g: GaussianBump, L: float) -> float:
    """∫ H_per f · g，内层为周期主值求积"""
    center = float(g.center[0])
    reach = 12.0 * g.width
    value, _ = integrate.quad(
        lambda x: periodic_hilbert_quadrature_1d(lambda t: float(f.boundary(t)), x, L) * float(g.boundary(x)),
        center - reach, center + reach, limit=200)
    return value


def _gv_case(report: ExperimentReport, f: HarmonicFunction, g: HarmonicFunction, i: int,
             spec: GridSpec, label: str):
    result = gundy_varopoulos_pairing(f, g, i, spec)
    target = HALF_SPACE_ORIENTATION * grid_riesz_pairing(f, g, i, spec)
    tolerance = TOLERANCES["pairing_relative"]
    d = spec.d
    report.add_estimate("d", d, f"half_space_integral{label}", result["value"], exact=True)
    report.add_estimate("d", d, f"grid_pairing_oriented{label}", target, exact=True)
    report.derived[f"tail_bound{label}"] = result["tail_bound"]
    report.derived[f"richardson_change{label}"] = abs(result["value"] - result["fine"])

    error = relative_error(result["value"], target)
    report.derived[f"relative_error{label}"] = error
    report.add_check(f"half_space_matches_grid{label}", error <= tolerance, observed=error, threshold=tolerance)

    if d == 1 and isinstance(f, GaussianBump) and isinstance(g, GaussianBump):
        quadrature = HALF_SPACE_ORIENTATION * _pv_pairing_1d(f, g, spec.L)
        report.add_estimate("d", d, f"pv_quadrature_oriented{label}", quadrature, exact=True)
        pv_error = relative_error(result["value"], quadrature)
        report.derived[f"pv_relative_error{label}"] = pv_error
        report.add_check(f"half_space_matches_pv_quadrature{label}", pv_error <= tolerance,
                         observed=pv_error, threshold=tolerance)

        probes = np.linspace(-3.0, 3.0, 7)
        line = np.array([line_hilbert_quadrature_1d(lambda t: float(f.boundary(t)), x) for x in probes])
        report.derived[f"dawson_vs_line_quadrature{label}"] = float(np.max(np.abs(line - f.hilbert_boundary(probes))))


def run_gv_identity(cfg: RunConfig, f: Optional[HarmonicFunction] = None,
                    g: Optional[HarmonicFunction] = None, i: Optional[int] = None,
                    spec: Optional[GridSpec] = None) -> ExperimentReport:
    """
    确定性比较 ∫_Ω ⟨A_i∇f, ∇g⟩·2x₀ 与 −⟨R_i f, g⟩
    未给出测试函数时，同时检查 d = cfg.d 与 d = 1 的默认高斯对及对称对
    """
    report = new_report("gv_identity", cfg)
    logger.info(f"🚀 开始半空间配对恒等式实验: d={cfg.d}, i={cfg.i}, L={cfg.L}, M={cfg.M}")

    if f is not None or g is not None:
        d = (f or g).d
        spec = spec or grid_spec(cfg, d)
        default_f, default_g = default_pair(cfg, d, i or cfg.i)
        _gv_case(report, f or default_f, g or default_g, i or cfg.i, spec, "")
    else:
        for d in sorted({1, cfg.d}):
            case_i = cfg.i if d == cfg.d else 1
            case_spec = grid_spec(cfg, d)
            pair_f, pair_g = default_pair(cfg, d, case_i)
            _gv_case(report, pair_f, pair_g, case_i, case_spec, f"_d{d}")

            symmetric = gundy_varopoulos_pairing(pair_f, pair_f, case_i, case_spec)["value"]
            symmetric_grid = grid_riesz_pairing(pair_f, pair_f, case_i, case_spec)
            worst = max(abs(symmetric), abs(symmetric_grid))
            report.add_estimate("d", d, "symmetric_pair", symmetric, exact=True)
            report.add_check(f"symmetric_pair_zero_d{d}", worst <= TOLERANCES["exact_identity"],
                             observed=worst, threshold=TOLERANCES["exact_identity"])

    logger.info(f"{'✅' if report.passed else '❌'} 半空间配对恒等式实验结束")
    return report
