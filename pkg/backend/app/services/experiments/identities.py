"""
枚举模式下的精确恒等式：离散柯西-黎曼关系、鞅变换恒等式与系数树算子代数
"""
import logging
from typing import List, Optional

import numpy as np

from ...config.run_config import RunConfig
from ...core.config import TOLERANCES, settings
from ...models.experiment_models import ExperimentReport
from ..dyadic.core import verify_sign_convention
from ..dyadic.haar_ops import (
    DyadicFunctionSamples,
    HaarCoefficients,
    decompose,
    dyadic_hilbert,
    dyadic_riesz,
    hilbert_operator,
    lp_norm,
    operator_matrices,
    operator_norm_estimate,
    riesz_operator,
    root_projection,
    slice_projection,
)
from ..harmonic.families import HarmonicFunction, PlaneWave
from ..martingale.engine import verify_cauchy_riemann, verify_transform_identity
from ..stochastics.enumeration import check_cap
from .common import new_report, walk_config

logger = logging.getLogger(__name__)

_PLANE_WAVE_FREQUENCY = (0.7, 0.4, 0.25)


def _layer_range(cfg: RunConfig) -> List[int]:
    """1 … layers 中不超过枚举上限的层数"""
    limit = settings.ENUMERATION_CAP // cfg.d
    if cfg.layers > limit:
        logger.warning(f"⚠️ layers={cfg.layers} 超过枚举上限，截断为 {limit}")
    return list(range(1, min(cfg.layers, limit) + 1))


def run_cauchy_riemann(cfg: RunConfig) -> ExperimentReport:
    """逐叶检查 S_i dB_k = A_i^T dB_k，i = 1 … d"""
    report = new_report("cauchy_riemann", cfg)
    tolerance = TOLERANCES["cauchy_riemann"]
    logger.info(f"🚀 开始柯西-黎曼检查: d={cfg.d}, layers={cfg.layers}")

    for i in range(1, cfg.d + 1):
        walk = walk_config(cfg, cfg.N[0], i)
        for k in _layer_range(cfg):
            error = verify_cauchy_riemann(walk, k)
            report.add_estimate("k", k, f"cauchy_riemann_error_i{i}", error, exact=True)
            report.add_check(f"cauchy_riemann[i={i},k={k}]", error <= tolerance,
                             observed=error, threshold=tolerance)
        # 嵌入更深的树后结论不变
        k = _layer_range(cfg)[0]
        depth = k * cfg.d + 3
        check_cap(depth - 1)
        embedded = verify_cauchy_riemann(walk, k, depth=depth)
        report.add_check(f"cauchy_riemann_embedded[i={i},k={k},depth={depth}]", embedded <= tolerance,
                         observed=embedded, threshold=tolerance)

    logger.info(f"{'✅' if report.passed else '❌'} 柯西-黎曼检查结束")
    return report


def run_transform_identity(cfg: RunConfig, f: Optional[HarmonicFunction] = None) -> ExperimentReport:
    """
    S_i M_k^{(i),f} 与 M_k^{(i),i} 的逐叶比较、离散鞅性质，
    以及兄弟对常数情形下的离散 L^p 不等式 ‖M_k^i‖_p ≤ ‖S_i‖_p·‖M_k^f‖_p
    """
    f = f or PlaneWave(_PLANE_WAVE_FREQUENCY[:cfg.d], phase=0.3)
    report = new_report("transform_identity", cfg)
    rounding = TOLERANCES["exact_identity"]
    logger.info(f"🚀 开始鞅变换恒等式检查: d={cfg.d}, layers={cfg.layers}")

    for i in range(1, cfg.d + 1):
        walk = walk_config(cfg, cfg.N[0], i)
        previous = None
        for k in _layer_range(cfg):
            result = verify_transform_identity(walk, k, f)
            exact = bool(result["exact"])
            report.add_estimate("k", k, f"transform_discrepancy_i{i}", result["discrepancy"], exact=True)
            report.derived[f"transform_bound_i{i}_k{k}"] = result["bound"]
            report.add_check(f"transform_identity[i={i},k={k}]", result["discrepancy"] <= result["bound"],
                             observed=result["discrepancy"], threshold=result["bound"],
                             detail="逐叶精确" if exact else "二阶导数上界")

            # 每组 2^d 个相邻叶子共享前 (k−1)d+1 个抛币
            group = 1 << cfg.d
            for key, label, start in (("plain_values", "plain", float(f.value(walk.start))),
                                      ("transformed_values", "transformed", 0.0)):
                conditional = result[key].reshape(-1, group).mean(axis=1)
                earlier = np.array([start]) if previous is None else previous[key]
                gap = float(np.max(np.abs(conditional - earlier)))
                report.add_check(f"martingale_property_{label}[i={i},k={k}]", gap <= rounding,
                                 observed=gap, threshold=rounding)
            previous = result

            if exact:
                depth = k * cfg.d + 1
                plain = DyadicFunctionSamples(depth, result["plain_values"])
                transformed = DyadicFunctionSamples(depth, result["transformed_values"])
                for q in cfg.p:
                    if q <= 1.0:
                        continue
                    ratio = lp_norm(transformed, q) / lp_norm(plain, q)
                    bound = operator_norm_estimate(riesz_operator(i, cfg.d), q, depth,
                                                   restarts=cfg.restarts, iterations=cfg.iterations,
                                                   seed=cfg.seed, starts=[result["plain_values"]])
                    report.add_estimate("k", k, f"lp_ratio_i{i}_p{q:g}", ratio, exact=True)
                    report.add_check(f"discrete_lp_inequality[i={i},k={k},p={q:g}]", ratio <= bound + rounding,
                                     observed=ratio, threshold=bound)

    logger.info(f"{'✅' if report.passed else '❌'} 鞅变换恒等式检查结束")
    return report


def coefficient_basis(depth: int) -> HaarCoefficients:
    """全部 2^K 个系数基向量，作为向量值函数的分量一次性处理"""
    n = 1 << depth
    mean = np.zeros(n)
    mean[0] = 1.0
    coeffs = np.zeros((n - 1, n))
    coeffs[np.arange(n - 1), np.arange(1, n)] = 1.0
    return HaarCoefficients(depth, mean, coeffs)


def _max_abs(c: HaarCoefficients) -> float:
    return float(max(np.max(np.abs(c.mean)), np.max(np.abs(c.coeffs), initial=0.0)))


def run_operator_algebra(cfg: RunConfig, depth: Optional[int] = None) -> ExperimentReport:
    """系数树上 S、S_i、Π_root、Π_i 的代数关系"""
    depth = cfg.depth if depth is None else depth
    d = cfg.d
    tolerance = TOLERANCES["operator_algebra"]
    report = new_report("operator_algebra", cfg)
    logger.info(f"🚀 开始算子代数检查: d={d}, 深度={depth}")

    def record(name: str, value: float):
        report.add_estimate("depth", depth, name, value, exact=True)
        report.add_check(name, value <= tolerance, observed=value, threshold=tolerance)

    basis = coefficient_basis(depth)
    complement = basis - root_projection(basis)
    record("hilbert_square", _max_abs(dyadic_hilbert(dyadic_hilbert(basis)) + complement))

    total = HaarCoefficients.zeros(depth, basis.value_dim)
    for i in range(1, d + 1):
        total = total + dyadic_riesz(i, d, dyadic_riesz(i, d, basis))
        for j in range(1, d + 1):
            if j != i:
                record(f"riesz_product_zero_{i}{j}", _max_abs(dyadic_riesz(i, d, dyadic_riesz(j, d, basis))))
    record("riesz_square_sum", _max_abs(total + complement))

    rng = np.random.Generator(np.random.Philox(key=np.array([cfg.seed, depth], dtype=np.uint64)))
    samples = DyadicFunctionSamples(depth, rng.standard_normal((1 << depth, 16)))
    c = decompose(samples)
    energy = c.energy()
    record("haar_parseval", float(np.max(np.abs(energy - np.mean(samples.values ** 2, axis=0)))))
    pieces = root_projection(c).energy()
    for i in range(1, d + 1):
        sliced = slice_projection(i, d, c).energy()
        pieces = pieces + sliced
        record(f"slice_isometry_{i}", float(np.max(np.abs(dyadic_riesz(i, d, c).energy() - sliced))))
    record("slice_decomposition", float(np.max(np.abs(pieces - energy))))

    if d == 1:
        same = np.array_equal(dyadic_riesz(1, 1, basis).coeffs, dyadic_hilbert(basis).coeffs)
        report.add_check("riesz_equals_hilbert_d1", same)

    rank_depth = min(depth, 9)
    rank = int(np.linalg.matrix_rank(operator_matrices(hilbert_operator, rank_depth)[0]))
    report.add_estimate("depth", rank_depth, "hilbert_rank", rank, exact=True)
    report.add_check(f"hilbert_rank[depth={rank_depth}]", rank == (1 << rank_depth) - 2,
                     observed=rank, threshold=(1 << rank_depth) - 2)
    report.add_check("sign_convention", verify_sign_convention(6))

    logger.info(f"{'✅' if report.passed else '❌'} 算子代数检查结束")
    return report
