"""
粗步转移核

给定上一个已消耗的抛币 ε_{nNd}，一个粗步 dX_{n+1}（以 √(2δ) 为单位的整数向量）
与下一个选择子 ε_{(n+1)Nd} 的联合分布只依赖于这一个抛币。
逐层动态规划得到精确分布（概率都是 2^{−Nd} 的整数倍，浮点表示无误差），
用于按分布精确地抽样粗游走，也作为第二个精确矩预言机。
"""
import itertools
import logging
from typing import Dict, Tuple

import numpy as np

from .walks import layer_increments

logger = logging.getLogger(__name__)


def _toss_slot(toss: int) -> int:
    return 0 if toss == -1 else 1


class CoarseKernel:
    """一个粗步（window 层）的精确转移核"""

    def __init__(self, d: int, i: int, window: int):
        self.d = d
        self.i = i
        self.window = window
        self.width = 2 * window + 1
        self._distributions = {s: self._build(s) for s in (-1, 1)}
        self._samplers = {s: self._sampler(dist) for s, dist in self._distributions.items()}
        logger.debug(f"粗步转移核构建完成: d={d}, i={i}, 窗口={window}, "
                     f"支撑点数={[len(self._samplers[s][0]) for s in (-1, 1)]}")

    def _layer_moves(self, selector: int):
        """一层内 2^d 种抛币序列：(位移整数向量, 末位抛币)"""
        moves = []
        for sequence in itertools.product((-1, 1), repeat=self.d):
            values = np.array(sequence)
            selectors = np.concatenate([[selector], values[:-1]])
            displacement = layer_increments(selectors, values, self.i, 1.0).astype(np.int64)
            moves.append((tuple(displacement), sequence[-1]))
        return moves

    def _build(self, initial_toss: int) -> np.ndarray:
        shape = (2,) + (self.width,) * (self.d + 1)
        state = np.zeros(shape)
        state[(_toss_slot(initial_toss),) + (self.window,) * (self.d + 1)] = 1.0
        moves = {s: self._layer_moves(s) for s in (-1, 1)}
        weight = 2.0 ** (-self.d)
        axes = tuple(range(self.d + 1))
        for _ in range(self.window):
            fresh = np.zeros(shape)
            for selector in (-1, 1):
                mass = state[_toss_slot(selector)]
                if not mass.any():
                    continue
                for displacement, last in moves[selector]:
                    # |位移| ≤ window，roll 不会回绕
                    fresh[_toss_slot(last)] += weight * np.roll(mass, displacement, axis=axes)
            state = fresh
        return state

    def _sampler(self, distribution: np.ndarray):
        flat = distribution.reshape(-1)
        support = np.flatnonzero(flat)
        probabilities = flat[support]
        cdf = np.cumsum(probabilities)
        cdf /= cdf[-1]
        unravelled = np.unravel_index(support, distribution.shape)
        last_toss = np.where(unravelled[0] == 0, -1, 1).astype(np.int8)
        displacement = np.stack(unravelled[1:], axis=1) - self.window
        return support, cdf, last_toss, displacement, probabilities

    def distribution(self, initial_toss: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(末位抛币, 整数位移, 概率)"""
        _, _, last_toss, displacement, probabilities = self._samplers[initial_toss]
        return last_toss, displacement, probabilities

    def moments(self, initial_toss: int, powers=(4, 6)) -> Dict[str, np.ndarray]:
        """以 √(2δ) 为单位的精确条件矩"""
        _, displacement, probabilities = self.distribution(initial_toss)
        v = displacement.astype(float)
        result = {
            "mean": probabilities @ v,
            "second": np.einsum("k,ka,kb->ab", probabilities, v, v),
        }
        for power in powers:
            result[f"abs{power}"] = probabilities @ np.abs(v) ** power
        return result

    def sample(self, initial_tosses: np.ndarray, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        """
        按精确分布抽样

        参数:
            initial_tosses: (P,) 每条路径上一个已消耗的抛币

        返回:
            (整数位移 (P, d+1), 新的末位抛币 (P,))
        """
        count = initial_tosses.shape[0]
        displacement = np.zeros((count, self.d + 1), dtype=np.int64)
        last = np.empty(count, dtype=np.int8)
        uniforms = rng.random(count)
        for toss_value in (-1, 1):
            rows = np.flatnonzero(initial_tosses == toss_value)
            if rows.size == 0:
                continue
            _, cdf, last_toss, moves, _ = self._samplers[toss_value]
            picks = np.minimum(np.searchsorted(cdf, uniforms[rows], side="right"), cdf.size - 1)
            displacement[rows] = moves[picks]
            last[rows] = last_toss[picks]
        return displacement, last
