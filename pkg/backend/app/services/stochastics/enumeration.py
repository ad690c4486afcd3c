"""
精确枚举预言机
概率空间是带二进滤子的 [0,1)，深度 G+1 的全部抛币前缀（叶子）等权，
对叶子求平均即得精确期望（仅有浮点舍入）
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, TypeVar

import numpy as np

from ...core.config import settings
from ...core.exceptions import EnumerationCapError
from ..dyadic.core import leaf_tosses
from ..dyadic.haar_ops import DyadicFunctionSamples
from .walks import WalkConfig, accumulate_positions, fine_increments, layer_increments

logger = logging.getLogger(__name__)

R = TypeVar("R")


def check_cap(generations: int, cap: Optional[int] = None):
    cap = settings.ENUMERATION_CAP if cap is None else cap
    if generations > cap:
        raise EnumerationCapError(f"枚举需要 {generations} 代，超过上限 {cap}")


@dataclass
class EnumerationBatch:
    """全部叶子上的游走，叶子按 x 的顺序排列"""
    config: WalkConfig
    k_max: int
    tosses: np.ndarray
    increments: np.ndarray
    positions: np.ndarray

    @property
    def n_tosses(self) -> int:
        return self.k_max * self.config.d + 1

    @property
    def n_leaves(self) -> int:
        return self.tosses.shape[0]

    @property
    def weight(self) -> float:
        return 2.0 ** (-self.n_tosses)

    def expectation(self, values: np.ndarray) -> np.ndarray:
        return np.sum(values, axis=0) * self.weight

    def conditional_expectation(self, values: np.ndarray, known_tosses: int) -> np.ndarray:
        """
        E[values | ε_0 … ε_{known_tosses−1}]
        同一前缀的叶子在 x 顺序下连续，每组一个值
        """
        groups = 1 << known_tosses
        grouped = values.reshape((groups, -1) + values.shape[1:])
        return np.sum(grouped, axis=1) * (2.0 ** (known_tosses - self.n_tosses))

    def step_function(self, values: np.ndarray) -> DyadicFunctionSamples:
        """把叶子上的取值看作 x 的二进阶梯函数"""
        return DyadicFunctionSamples(self.n_tosses, values)


def enumerate_walks(cfg: WalkConfig, k_max: int,
                    visitor: Optional[Callable[[EnumerationBatch], R]] = None,
                    cap: Optional[int] = None):
    """
    枚举 k_max 个细步的全部抛币前缀（包含第 0 代选择子），不施加停止

    返回:
        visitor(batch)；未给出 visitor 时返回 batch 本身
    """
    generations = k_max * cfg.d
    check_cap(generations, cap)
    tosses = leaf_tosses(generations + 1)
    increments = fine_increments(tosses, cfg.d, cfg.i, cfg.step_size)
    positions = accumulate_positions(cfg.start, increments)
    batch = EnumerationBatch(cfg, k_max, tosses, increments, positions)
    logger.debug(f"枚举完成: d={cfg.d}, i={cfg.i}, k_max={k_max}, 叶子数={batch.n_leaves}")
    return visitor(batch) if visitor is not None else batch


def layer_increment_field(cfg: WalkConfig, k: int, cap: Optional[int] = None) -> np.ndarray:
    """
    第 k 层增量 dB_k 作为深度 kd+1 的阶梯函数，只生成该层用到的抛币列

    返回:
        (2^{kd+1}, d+1)
    """
    generations = k * cfg.d
    check_cap(generations, cap)
    columns = range((k - 1) * cfg.d, k * cfg.d + 1)
    tosses = leaf_tosses(generations + 1, columns)
    return layer_increments(tosses[:, :-1], tosses[:, 1:], cfg.i, cfg.step_size)
