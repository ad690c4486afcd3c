"""
抛币驱动的 (d+1) 维离散随机游走

第 k 层（第 (k−1)d+1 … kd 代）给出一个细步 dB_k：
    水平分量 j：√(2δ)·ε^−_{(k−1)d+j}
    竖直分量：  √(2δ)·ε^+_{(k−1)d+i}
其中 ε^±_g = 1(ε_{g−1} = ±1)·ε_g。第 0 代抛币只作为第 1 代的选择子。
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple, Union

import numpy as np

from ...core.exceptions import ConfigError, LengthMismatchError
from ..dyadic.core import DyadicPoint

logger = logging.getLogger(__name__)

COUPLED = "coupled"
DECOUPLED = "decoupled"


@dataclass(frozen=True)
class WalkConfig:
    """
    游走参数
    耦合模式：δ = T/N⁵，θ = Nδ，ε = 1/N，细步数 N⁵，粗步数 N⁴
    解耦模式：显式给出 δ、θ、ε，粗化窗口 θ/δ 必须为整数
    """
    d: int = 2
    i: int = 1
    T: float = 4.0
    N: int = 4
    y: float = 1.0
    mode: str = COUPLED
    delta_value: Optional[float] = None
    theta_value: Optional[float] = None
    eps_value: Optional[float] = None

    def __post_init__(self):
        if self.d < 1:
            raise ConfigError(f"维数 d 必须为正，当前 {self.d}")
        if not 1 <= self.i <= self.d:
            raise ConfigError(f"变换编号 i={self.i} 不在 [1, {self.d}] 内")
        if self.T <= 0 or self.y <= 0:
            raise ConfigError(f"T 与 y 必须为正，当前 T={self.T}, y={self.y}")
        if self.N < 1:
            raise ConfigError(f"分辨率 N 必须为正，当前 {self.N}")
        if self.mode not in (COUPLED, DECOUPLED):
            raise ConfigError(f"未知游走模式: {self.mode}")
        if self.mode == DECOUPLED:
            if None in (self.delta_value, self.theta_value, self.eps_value):
                raise ConfigError("解耦模式需要同时给出 δ、θ、ε")
            if min(self.delta_value, self.theta_value, self.eps_value) <= 0:
                raise ConfigError("δ、θ、ε 必须为正")
            ratio = self.theta_value / self.delta_value
            if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio) or round(ratio) < 1:
                raise ConfigError(f"θ/δ = {ratio} 不是正整数")

    @property
    def delta(self) -> float:
        return self.T / self.N ** 5 if self.mode == COUPLED else float(self.delta_value)

    @property
    def theta(self) -> float:
        return self.N * self.delta if self.mode == COUPLED else float(self.theta_value)

    @property
    def eps(self) -> float:
        return 1.0 / self.N if self.mode == COUPLED else float(self.eps_value)

    @property
    def window(self) -> int:
        """每个粗步包含的细步数"""
        return self.N if self.mode == COUPLED else int(round(self.theta_value / self.delta_value))

    @property
    def coarse_steps(self) -> int:
        if self.mode == COUPLED:
            return self.N ** 4
        return max(1, int(round(self.T / self.theta)))

    @property
    def fine_steps(self) -> int:
        return self.coarse_steps * self.window

    @property
    def step_size(self) -> float:
        """单坐标步长 √(2δ)"""
        return math.sqrt(2.0 * self.delta)

    @property
    def coarse_step_bound(self) -> float:
        """一个粗步的单坐标位移上界 N·√(2δ)"""
        return self.window * self.step_size

    @property
    def start(self) -> np.ndarray:
        point = np.zeros(self.d + 1)
        point[0] = self.y
        return point

    def with_slice(self, i: int) -> "WalkConfig":
        return replace(self, i=i)


def layer_increments(selectors: np.ndarray, values: np.ndarray, i: int, step: float) -> np.ndarray:
    """
    一层的增量

    参数:
        selectors: (..., d) 本层各代的选择子 ε_{g−1}
        values: (..., d) 本层各代的抛币 ε_g
        i: 竖直分量取自本层第 i 代
        step: 步长 √(2δ)

    返回:
        (..., d+1) 增量，第 0 个分量为竖直方向
    """
    d = values.shape[-1]
    out = np.zeros(values.shape[:-1] + (d + 1,))
    out[..., 1:] = np.where(selectors == -1, values, 0) * step
    out[..., 0] = np.where(selectors[..., i - 1] == 1, values[..., i - 1], 0) * step
    return out


def fine_increments(tosses: np.ndarray, d: int, i: int, step: float) -> np.ndarray:
    """
    由 ε_0 … ε_{kd} 计算 k 个细步增量

    参数:
        tosses: (..., k·d+1) 抛币数组

    返回:
        (..., k, d+1) 增量
    """
    tosses = np.asarray(tosses)
    generations = tosses.shape[-1] - 1
    if generations % d:
        raise LengthMismatchError(f"抛币个数 {tosses.shape[-1]} 不是 k·d+1 的形式 (d={d})")
    layers = generations // d
    lead = tosses.shape[:-1]
    selectors = tosses[..., :-1].reshape(lead + (layers, d))
    values = tosses[..., 1:].reshape(lead + (layers, d))
    return layer_increments(selectors, values, i, step)


def accumulate_positions(start: np.ndarray, increments: np.ndarray) -> np.ndarray:
    """B_k = B_0 + Σ_{ℓ≤k} dB_ℓ，沿倒数第二个轴累加"""
    cumulative = np.cumsum(increments, axis=-2)
    shape = increments.shape[:-2] + (1, increments.shape[-1])
    head = np.broadcast_to(start, shape)
    return np.concatenate([head, start + cumulative], axis=-2)


def freeze_at_entry(start: np.ndarray, increments: np.ndarray, eps: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    在第一个竖直坐标 ≤ ε 的细步处冻结

    参数:
        start: (..., d+1) 起点，竖直坐标假定 > ε
        increments: (..., k, d+1) 细增量

    返回:
        (冻结后的增量副本, 存活细步数 (...))，未进入 ε 带时存活细步数为 k。
        进入点的竖直坐标截断到 0（仅当 √(2δ) > ε 时可能生效）
    """
    steps = increments.shape[-2]
    if steps == 0:
        return increments.copy(), np.zeros(increments.shape[:-2], dtype=np.int64)
    verticals = start[..., None, 0] + np.cumsum(increments[..., 0], axis=-1)
    inside = verticals <= eps
    entered = inside.any(axis=-1)
    live = np.where(entered, inside.argmax(axis=-1) + 1, steps)
    frozen = np.where((np.arange(steps) >= live[..., None])[..., None], 0.0, increments)
    overshoot = np.where(entered, np.minimum(start[..., 0] + frozen[..., 0].sum(axis=-1), 0.0), 0.0)
    if np.any(overshoot < 0):
        last = np.clip(live - 1, 0, steps - 1)[..., None]
        vertical = frozen[..., 0]
        np.put_along_axis(vertical, last,
                          np.take_along_axis(vertical, last, axis=-1) - overshoot[..., None], axis=-1)
    return frozen, live


@dataclass
class WalkPath:
    """单条细游走"""
    config: WalkConfig
    increments: np.ndarray
    positions: np.ndarray
    stop_fine_index: int
    stop_coarse_index: int
    tosses: Optional[np.ndarray] = None

    @property
    def k_max(self) -> int:
        return self.increments.shape[0]


@dataclass
class CoarsePath:
    """粗粒化游走 X_n = B_{nN}"""
    positions: np.ndarray
    window: int
    theta: float
    stop_index: int

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.positions, axis=0)

    @property
    def steps(self) -> int:
        return self.positions.shape[0] - 1

    @property
    def tau(self) -> float:
        """τ_ε = n_ε·θ"""
        return self.stop_index * self.theta


def first_stop_index(coarse_verticals: np.ndarray, eps: float) -> int:
    """第一个竖直坐标 ≤ ε 的粗步；从未进入时返回最后一个粗步"""
    hits = np.flatnonzero(coarse_verticals <= eps)
    return int(hits[0]) if hits.size else coarse_verticals.shape[0] - 1


def coarse_grain(path: WalkPath, N: int) -> CoarsePath:
    if N < 1 or path.k_max % N:
        raise LengthMismatchError(f"路径长度 {path.k_max} 不是窗口 {N} 的整数倍")
    positions = path.positions[::N].copy()
    stop = min(-(-path.stop_fine_index // N), positions.shape[0] - 1)
    return CoarsePath(positions, N, N * path.config.delta, stop)


def apply_stopping(coarse: CoarsePath, eps: float) -> CoarsePath:
    """n_ε 之后的粗步冻结在停止值"""
    if eps <= 0:
        raise ConfigError(f"ε 必须为正，当前 {eps}")
    stop = first_stop_index(coarse.positions[:, 0], eps)
    positions = coarse.positions.copy()
    positions[stop + 1:] = positions[stop]
    return CoarsePath(positions, coarse.window, coarse.theta, stop)


def stop_walk(path: WalkPath, eps: float) -> WalkPath:
    """
    在第一个进入 ε 带的细步处冻结

    粗停止序号 n_ε = ⌈k/N⌉ 恰是冻结后粗路径第一个 ≤ ε 的粗时刻，与 apply_stopping 一致
    """
    window = path.config.window
    complete = path.k_max // window
    start = path.positions[0]
    if start[0] <= eps:
        increments = np.zeros_like(path.increments)
        stop_fine = 0
    else:
        increments, live = freeze_at_entry(start, path.increments, eps)
        stop_fine = int(live)
    stop = min(-(-stop_fine // window), complete)
    positions = accumulate_positions(start, increments)
    return WalkPath(path.config, increments, positions, stop_fine, stop, path.tosses)


TossSource = Union[DyadicPoint, np.ndarray]


def _toss_array(tosses: TossSource, count: int) -> np.ndarray:
    if isinstance(tosses, DyadicPoint):
        return tosses.tosses(count)
    array = np.asarray(tosses, dtype=np.int8)
    if array.shape[-1] < count:
        raise LengthMismatchError(f"需要 {count} 个抛币，只提供了 {array.shape[-1]} 个")
    return array[..., :count]


def simulate_fine_walk(cfg: WalkConfig, tosses: TossSource, k_max: Optional[int] = None,
                       stop: bool = True) -> WalkPath:
    """由抛币流生成细游走，默认在粗时刻施加停止规则"""
    k_max = cfg.fine_steps if k_max is None else k_max
    eps_array = _toss_array(tosses, k_max * cfg.d + 1)
    increments = fine_increments(eps_array, cfg.d, cfg.i, cfg.step_size)
    positions = accumulate_positions(cfg.start, increments)
    path = WalkPath(cfg, increments, positions, k_max, k_max // cfg.window, eps_array)
    return stop_walk(path, cfg.eps) if stop else path


def simulate_walk_family(cfg: WalkConfig, tosses: TossSource, k_max: Optional[int] = None,
                         stop: bool = True) -> List[WalkPath]:
    """同一抛币流驱动的 d 条游走，水平分量在停止前完全相同"""
    k_max = cfg.fine_steps if k_max is None else k_max
    eps_array = _toss_array(tosses, k_max * cfg.d + 1)
    return [simulate_fine_walk(cfg.with_slice(i), eps_array, k_max, stop)
            for i in range(1, cfg.d + 1)]
