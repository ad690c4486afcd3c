"""
二进区间寻址、代/切片/层算术、哈尔函数与抛币值

符号约定：ε_I = 1_{I+} − 1_{I−}，右子区间取 +1。
这是唯一使 ε^± 的两种定义（"I_g^x 为左/右子区间" 与 "1(ε_{g−1} = ±1)·ε_g"）一致的选择，
模块导入时执行一次自检。
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from ...core.config import MAX_DYADIC_DEPTH
from ...core.exceptions import DyadicDomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """二进区间 [index·2^−gen, (index+1)·2^−gen)"""
    gen: int
    index: int

    def __post_init__(self):
        if not 0 <= self.gen <= MAX_DYADIC_DEPTH:
            raise DyadicDomainError(f"代数 {self.gen} 超出范围 [0, {MAX_DYADIC_DEPTH}]")
        if not 0 <= self.index < (1 << self.gen):
            raise DyadicDomainError(f"索引 {self.index} 超出第 {self.gen} 代的范围")

    @property
    def length(self) -> float:
        return 2.0 ** (-self.gen)

    @property
    def left(self) -> float:
        return self.index * self.length

    @property
    def right(self) -> float:
        return (self.index + 1) * self.length

    @property
    def is_left_child(self) -> bool:
        return self.gen >= 1 and self.index % 2 == 0

    @property
    def heap_position(self) -> int:
        """在按代排列的系数数组中的行号"""
        return (1 << self.gen) - 1 + self.index

    def contains(self, x: float) -> bool:
        return self.left <= x < self.right


ROOT = DyadicInterval(0, 0)


def children(interval: DyadicInterval) -> Tuple[DyadicInterval, DyadicInterval]:
    """返回 (I−, I+)"""
    if interval.gen >= MAX_DYADIC_DEPTH:
        raise DyadicDomainError(f"第 {interval.gen} 代区间的子区间超出深度上限")
    return (DyadicInterval(interval.gen + 1, 2 * interval.index),
            DyadicInterval(interval.gen + 1, 2 * interval.index + 1))


def parent(interval: DyadicInterval) -> DyadicInterval:
    if interval.gen == 0:
        raise DyadicDomainError("根区间没有父区间")
    return DyadicInterval(interval.gen - 1, interval.index // 2)


def _check_generation(g: int, d: int):
    if d < 1:
        raise DyadicDomainError(f"维数 d 必须为正整数，当前 {d}")
    if g == 0:
        raise DyadicDomainError("根代 (g=0) 不属于任何切片或层")
    if g < 0:
        raise DyadicDomainError(f"代数不能为负: {g}")


def slice_of(g: int, d: int) -> int:
    """第 g 代所属切片 ((g−1) mod d) + 1"""
    _check_generation(g, d)
    return (g - 1) % d + 1


def layer_of(g: int, d: int) -> int:
    """第 g 代所属层 ⌈g/d⌉"""
    _check_generation(g, d)
    return -(-g // d)


def layer_generations(k: int, d: int) -> range:
    """第 k 层覆盖的代 (k−1)d+1 … kd"""
    if k < 1:
        raise DyadicDomainError(f"层编号从 1 开始，当前 {k}")
    return range((k - 1) * d + 1, k * d + 1)


class DyadicPoint:
    """
    x ∈ [0,1) 的二进展开
    子类只需实现 digit(n)：第 n 位二进数字（n ≥ 1）
    """

    def digit(self, n: int) -> int:
        raise NotImplementedError

    def digits(self, count: int) -> np.ndarray:
        return np.array([self.digit(n) for n in range(1, count + 1)], dtype=np.int8)

    def interval_at(self, g: int) -> DyadicInterval:
        """包含 x 的第 g 代区间 I_g^x"""
        index = 0
        for bit in self.digits(g):
            index = 2 * index + int(bit)
        return DyadicInterval(g, index)

    def toss_at(self, g: int) -> int:
        """ε_g(x)：x 落在 I_g^x 的右子区间取 +1，否则 −1"""
        return 2 * self.digit(g + 1) - 1

    def tosses(self, count: int) -> np.ndarray:
        """ε_0 … ε_{count−1}"""
        return (2 * self.digits(count) - 1).astype(np.int8)


class BitVectorPoint(DyadicPoint):
    """有限位向量后端（枚举模式）"""

    def __init__(self, bits: Iterable[int]):
        self._bits = np.asarray(list(bits), dtype=np.int8)
        if self._bits.size and not np.all((self._bits == 0) | (self._bits == 1)):
            raise DyadicDomainError("二进数字只能为 0 或 1")

    @classmethod
    def from_float(cls, x: float, depth: int = MAX_DYADIC_DEPTH + 1) -> "BitVectorPoint":
        if not 0.0 <= x < 1.0:
            raise DyadicDomainError(f"点 {x} 不在 [0,1) 内")
        bits = []
        for _ in range(depth):
            # 浮点数乘2是精确运算
            x *= 2.0
            bit = int(x >= 1.0)
            bits.append(bit)
            x -= bit
        return cls(bits)

    @classmethod
    def from_tosses(cls, tosses: Iterable[int]) -> "BitVectorPoint":
        return cls((int(t) + 1) // 2 for t in tosses)

    @classmethod
    def from_leaf(cls, leaf: int, depth: int) -> "BitVectorPoint":
        """第 depth 代第 leaf 个区间的左端点，保留 depth 位"""
        return cls((leaf >> (depth - 1 - n)) & 1 for n in range(depth))

    def __len__(self) -> int:
        return int(self._bits.size)

    def digit(self, n: int) -> int:
        if n < 1:
            raise DyadicDomainError(f"二进数字从第 1 位开始，当前 {n}")
        if n > self._bits.size:
            raise DyadicDomainError(f"第 {n} 位超出有限展开长度 {self._bits.size}")
        return int(self._bits[n - 1])

    def digits(self, count: int) -> np.ndarray:
        if count > self._bits.size:
            raise DyadicDomainError(f"需要 {count} 位，有限展开只有 {self._bits.size} 位")
        return self._bits[:count].copy()


class StreamPoint(DyadicPoint):
    """惰性扩展的随机位流后端（蒙特卡洛模式），由单条路径独占"""

    def __init__(self, rng: np.random.Generator, chunk: int = 64):
        self._rng = rng
        self._chunk = chunk
        self._bits = np.empty(0, dtype=np.int8)

    def _extend(self, count: int):
        while self._bits.size < count:
            fresh = self._rng.integers(0, 2, size=self._chunk, dtype=np.int8)
            self._bits = np.concatenate([self._bits, fresh])

    def digit(self, n: int) -> int:
        if n < 1:
            raise DyadicDomainError(f"二进数字从第 1 位开始，当前 {n}")
        self._extend(n)
        return int(self._bits[n - 1])

    def digits(self, count: int) -> np.ndarray:
        self._extend(count)
        return self._bits[:count].copy()


PointLike = Union[float, DyadicPoint]


def as_point(x: PointLike) -> DyadicPoint:
    if isinstance(x, DyadicPoint):
        return x
    return BitVectorPoint.from_float(float(x))


def interval_at(x: PointLike, g: int) -> DyadicInterval:
    return as_point(x).interval_at(g)


def toss(interval: DyadicInterval, x: PointLike) -> int:
    """ε_I(x) = 1_{I+}(x) − 1_{I−}(x)"""
    point = as_point(x)
    if point.interval_at(interval.gen) != interval:
        return 0
    return 1 if point.digit(interval.gen + 1) == 1 else -1


def toss_split(g: int, x: PointLike) -> Tuple[int, int]:
    """(ε_g^−, ε_g^+)，ε_g^± = 1(ε_{g−1} = ±1)·ε_g"""
    if g < 1:
        raise DyadicDomainError("toss_split 要求 g ≥ 1")
    point = as_point(x)
    selector = point.toss_at(g - 1)
    value = point.toss_at(g)
    if selector == -1:
        return value, 0
    return 0, value


def haar(interval: DyadicInterval, x: PointLike) -> float:
    """L² 归一化哈尔函数 h_I(x) = (1_{I+} − 1_{I−})/√|I|"""
    return toss(interval, x) / math.sqrt(interval.length)


def leaf_tosses(n_tosses: int, columns: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    全部 2^n 个叶子（按 x 的顺序）上的抛币矩阵

    参数:
        n_tosses: 抛币个数 n（叶子为第 n 代区间）
        columns: 只取这些代的抛币，默认 0 … n−1

    返回:
        int8 数组，形状 (2^n, len(columns))，第 c 列为 ε_{columns[c]}
    """
    if columns is None:
        columns = range(n_tosses)
    leaves = np.arange(1 << n_tosses, dtype=np.int64)
    out = np.empty((leaves.size, len(columns)), dtype=np.int8)
    for c, g in enumerate(columns):
        if not 0 <= g < n_tosses:
            raise DyadicDomainError(f"抛币代数 {g} 超出 [0, {n_tosses})")
        out[:, c] = 2 * ((leaves >> (n_tosses - 1 - g)) & 1) - 1
    return out


def verify_sign_convention(depth: int = 6) -> bool:
    """检查 ε^± 的区间定义与抛币定义在深度 depth 的所有叶子上一致"""
    for leaf in range(1 << depth):
        point = BitVectorPoint.from_leaf(leaf, depth)
        for g in range(1, depth):
            eps_minus, eps_plus = toss_split(g, point)
            value = point.toss_at(g)
            if point.interval_at(g).is_left_child:
                expected = (value, 0)
            else:
                expected = (0, value)
            if (eps_minus, eps_plus) != expected:
                return False
    return True


if not verify_sign_convention():
    raise DyadicDomainError("符号约定自检失败：ε^± 的两种定义不一致")
