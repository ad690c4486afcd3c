"""
有限深度哈尔系数树上的分析/综合、二进希尔伯特变换 S、二进黎兹变换 S_i，
以及 L^p 算子范数的经验下界估计

系数按代排列：第 g 代区间 (g, m) 位于第 2^g − 1 + m 行。
g ≥ 1 时每一代从奇数行开始且长度为偶数，因此兄弟对恰好是相邻的 (奇, 偶) 行。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from ...analysis.operator_norms import lp_norm_points, power_iteration
from ...core.exceptions import DyadicDomainError
from .core import DyadicInterval, slice_of

logger = logging.getLogger(__name__)


@dataclass
class DyadicFunctionSamples:
    """第 K 代各区间上的取值，形状 (2^K, m)"""
    depth: int
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != (1 << self.depth):
            raise DyadicDomainError(f"深度 {self.depth} 需要 {1 << self.depth} 个取值，实际 {values.shape[0]}")
        self.values = values

    @classmethod
    def from_values(cls, values) -> "DyadicFunctionSamples":
        values = np.asarray(values, dtype=float)
        size = values.shape[0]
        depth = size.bit_length() - 1
        if size != (1 << depth):
            raise DyadicDomainError(f"取值个数 {size} 不是 2 的幂")
        return cls(depth, values)

    @property
    def value_dim(self) -> int:
        return self.values.shape[1]


@dataclass
class HaarCoefficients:
    """均值 ⟨f⟩_{I_0} 与第 0 … K−1 代全部区间上的系数 (f, h_I)"""
    depth: int
    mean: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        self.mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim == 1:
            coeffs = coeffs[:, None]
        if coeffs.shape[0] != (1 << self.depth) - 1:
            raise DyadicDomainError(f"深度 {self.depth} 需要 {(1 << self.depth) - 1} 个系数，实际 {coeffs.shape[0]}")
        self.coeffs = coeffs

    @classmethod
    def zeros(cls, depth: int, value_dim: int = 1) -> "HaarCoefficients":
        return cls(depth, np.zeros(value_dim), np.zeros(((1 << depth) - 1, value_dim)))

    @classmethod
    def basis(cls, depth: int, interval: Optional[DyadicInterval], value_dim: int = 1,
              component: int = 0) -> "HaarCoefficients":
        """单位基向量；interval 为 None 时表示常函数 1"""
        out = cls.zeros(depth, value_dim)
        if interval is None:
            out.mean[component] = 1.0
        else:
            if interval.gen >= depth:
                raise DyadicDomainError(f"区间代数 {interval.gen} 超出树深度 {depth}")
            out.coeffs[interval.heap_position, component] = 1.0
        return out

    @property
    def value_dim(self) -> int:
        return self.mean.shape[0]

    def coeff(self, interval: DyadicInterval) -> np.ndarray:
        if interval.gen >= self.depth:
            raise DyadicDomainError(f"区间代数 {interval.gen} 超出树深度 {self.depth}")
        return self.coeffs[interval.heap_position]

    def generation(self, g: int) -> np.ndarray:
        return self.coeffs[(1 << g) - 1:(1 << (g + 1)) - 1]

    def energy(self) -> np.ndarray:
        """各分量的平方和 Σ mean² + Σ coeff²"""
        return self.mean ** 2 + np.sum(self.coeffs ** 2, axis=0)

    def copy(self) -> "HaarCoefficients":
        return HaarCoefficients(self.depth, self.mean.copy(), self.coeffs.copy())

    def __add__(self, other: "HaarCoefficients") -> "HaarCoefficients":
        return HaarCoefficients(self.depth, self.mean + other.mean, self.coeffs + other.coeffs)

    def __sub__(self, other: "HaarCoefficients") -> "HaarCoefficients":
        return HaarCoefficients(self.depth, self.mean - other.mean, self.coeffs - other.coeffs)

    def __neg__(self) -> "HaarCoefficients":
        return HaarCoefficients(self.depth, -self.mean, -self.coeffs)

    def scale(self, factor: float) -> "HaarCoefficients":
        return HaarCoefficients(self.depth, factor * self.mean, factor * self.coeffs)


def generation_of_rows(depth: int) -> np.ndarray:
    """系数数组每一行所属的代"""
    return np.repeat(np.arange(depth), 1 << np.arange(depth))


def decompose(samples: DyadicFunctionSamples) -> HaarCoefficients:
    """精确的有限哈尔变换"""
    averages = samples.values.copy()
    m = samples.value_dim
    coeffs = np.empty(((1 << samples.depth) - 1, m))
    for g in range(samples.depth - 1, -1, -1):
        pairs = averages.reshape(1 << g, 2, m)
        left, right = pairs[:, 0], pairs[:, 1]
        # (f, h_I) = (⟨f⟩_{I+} − ⟨f⟩_{I−})·√|I|/2
        coeffs[(1 << g) - 1:(1 << (g + 1)) - 1] = (right - left) * (2.0 ** (-g / 2.0)) / 2.0
        averages = (left + right) / 2.0
    return HaarCoefficients(samples.depth, averages[0], coeffs)


def reconstruct(c: HaarCoefficients) -> DyadicFunctionSamples:
    """decompose 的逆变换"""
    averages = c.mean[None, :].copy()
    for g in range(c.depth):
        step = c.generation(g) * (2.0 ** (g / 2.0))
        refined = np.empty((2 * averages.shape[0], c.value_dim))
        refined[0::2] = averages - step
        refined[1::2] = averages + step
        averages = refined
    return DyadicFunctionSamples(c.depth, averages)


def dyadic_hilbert(c: HaarCoefficients) -> HaarCoefficients:
    """
    二进希尔伯特变换：均值与 h_{I_0} 映为 0，
    对每个父区间 out(I+) = −in(I−)，out(I−) = +in(I+)
    """
    out = np.zeros_like(c.coeffs)
    out[1::2] = c.coeffs[2::2]
    out[2::2] = -c.coeffs[1::2]
    return HaarCoefficients(c.depth, np.zeros_like(c.mean), out)


def slice_mask(depth: int, i: int, d: int) -> np.ndarray:
    """系数行是否属于切片 i（根代不属于任何切片）"""
    if not 1 <= i <= d:
        raise DyadicDomainError(f"切片编号 i={i} 不在 [1, {d}] 内")
    generations = generation_of_rows(depth)
    return (generations >= 1) & ((generations - 1) % d + 1 == i)


def dyadic_riesz(i: int, d: int, c: HaarCoefficients) -> HaarCoefficients:
    """二进黎兹变换 S_i：只在切片 i 上作用兄弟对规则，其余系数映为 0"""
    mask = slice_mask(c.depth, i, d)
    out = dyadic_hilbert(c)
    out.coeffs[~mask] = 0.0
    return out


def root_projection(c: HaarCoefficients) -> HaarCoefficients:
    """Π_root：投影到 span{1, h_{I_0}}"""
    out = HaarCoefficients.zeros(c.depth, c.value_dim)
    out.mean[:] = c.mean
    if c.depth >= 1:
        out.coeffs[0] = c.coeffs[0]
    return out


def slice_projection(i: int, d: int, c: HaarCoefficients) -> HaarCoefficients:
    """Π_i：投影到切片 i 的系数"""
    mask = slice_mask(c.depth, i, d)
    out = HaarCoefficients.zeros(c.depth, c.value_dim)
    out.coeffs[mask] = c.coeffs[mask]
    return out


def lp_norm(samples: DyadicFunctionSamples, p: float) -> float:
    """(2^−K Σ |value|_{ℓ²}^p)^{1/p}"""
    if p < 1:
        raise ValueError(f"要求 p ≥ 1，当前 p={p}")
    return lp_norm_points(samples.values, p)


CoefficientOperator = Callable[[HaarCoefficients], Union[HaarCoefficients, Sequence[HaarCoefficients]]]


def identity_operator(c: HaarCoefficients) -> HaarCoefficients:
    return c.copy()


def hilbert_operator(c: HaarCoefficients) -> HaarCoefficients:
    return dyadic_hilbert(c)


def riesz_operator(i: int, d: int) -> CoefficientOperator:
    def apply(c: HaarCoefficients) -> HaarCoefficients:
        return dyadic_riesz(i, d, c)
    return apply


def riesz_vector_operator(d: int) -> CoefficientOperator:
    """f ↦ (S_1 f, …, S_d f)"""
    def apply(c: HaarCoefficients) -> List[HaarCoefficients]:
        return [dyadic_riesz(i, d, c) for i in range(1, d + 1)]
    return apply


def operator_matrices(op: CoefficientOperator, depth: int) -> List[np.ndarray]:
    """
    把系数树算子写成样本空间上的矩阵
    单位矩阵的各列作为向量值函数的分量一次性变换
    """
    n = 1 << depth
    columns = decompose(DyadicFunctionSamples(depth, np.eye(n)))
    result = op(columns)
    outputs = [result] if isinstance(result, HaarCoefficients) else list(result)
    return [reconstruct(out).values for out in outputs]


def operator_norm_estimate(op: CoefficientOperator,
                           p: float,
                           depth: int,
                           restarts: int = 8,
                           iterations: int = 50,
                           seed: int = 0,
                           starts: Sequence[np.ndarray] = ()) -> float:
    """
    ‖op‖_{p→p} 在深度 K 上的可验证下界

    从深度 1 逐级加深，每一级用上一级的最优输入（细化后）作热启动，
    因此对固定种子随深度单调不减。标量输入，输出可为向量（逐点 ℓ² 范数）。
    """
    if p <= 1:
        raise ValueError(f"要求 p > 1，当前 p={p}")
    if depth < 1:
        raise DyadicDomainError(f"要求深度 K ≥ 1，当前 {depth}")

    best_ratio = 0.0
    warm: Optional[np.ndarray] = None
    for level in range(1, depth + 1):
        matrices = operator_matrices(op, level)
        stacked = np.stack(matrices, axis=2)  # (n, n, C)

        def apply(x: np.ndarray) -> np.ndarray:
            out = np.einsum("rjc,j->rc", stacked, x)
            return out[:, 0] if out.shape[1] == 1 else out

        def adjoint(y: np.ndarray) -> np.ndarray:
            y2 = y[:, None] if y.ndim == 1 else y
            return np.einsum("rjc,rc->j", stacked, y2)

        level_starts = [np.asarray(s, dtype=float) for s in starts if np.asarray(s).size == (1 << level)]
        if warm is not None:
            level_starts.append(np.repeat(warm, 2))
        found = power_iteration(apply, adjoint, 1 << level, p,
                                starts=level_starts, restarts=restarts,
                                iterations=iterations, seed=seed + level)
        if found["argmax"] is not None:
            warm = found["argmax"]
        best_ratio = max(best_ratio, found["ratio"])
        logger.debug(f"深度 {level}: 当前下界 {best_ratio:.12f}")

    logger.info(f"算子范数下界估计完成: p={p}, 深度={depth}, 下界={best_ratio:.9f}")
    return best_ratio


def riesz_vector_norm_estimate(d: int, p: float, depth: int, **budget) -> float:
    """ℓ² 聚合的 (S_1, …, S_d) 范数下界"""
    return operator_norm_estimate(riesz_vector_operator(d), p, depth, **budget)
