"""
上半空间中的布朗运动参考采样
按子步检测竖直坐标穿过 0，可选布朗桥穿越修正：
两端竖直坐标 a, b > 0 时，子步内穿越的概率为 exp(−2ab/h)
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class BrownianPath:
    """单条布朗路径，命中后冻结在边界上"""
    start: np.ndarray
    substep: float
    times: np.ndarray
    positions: np.ndarray
    hit: bool
    hit_time: Optional[float]
    hit_index: Optional[int]

    @property
    def exit_point(self) -> np.ndarray:
        return self.positions[-1]


def _crossing(a: np.ndarray, b: np.ndarray, substep: float, uniforms: Optional[np.ndarray]):
    """
    返回 (是否命中, 子步内的命中比例)
    端点穿越按线性插值定位；桥修正命中取子步中点
    """
    endpoint = b <= 0.0
    fraction = np.where(endpoint, a / np.where(endpoint, a - b, 1.0), 0.5)
    if uniforms is None:
        return endpoint, fraction
    with np.errstate(over="ignore"):
        bridge_prob = np.exp(-2.0 * np.maximum(a, 0.0) * np.maximum(b, 0.0) / substep)
    bridged = ~endpoint & (uniforms < bridge_prob)
    return endpoint | bridged, fraction


def sample_brownian(start, horizon: float, substep: float, rng: np.random.Generator,
                    bridge: bool = True) -> BrownianPath:
    """单条路径采样，直到命中或到达 horizon"""
    if substep <= 0:
        raise ValueError(f"子步长必须为正，当前 {substep}")
    start = np.asarray(start, dtype=float)
    n_steps = int(math.floor(horizon / substep + 1e-9))
    if n_steps <= 0:
        return BrownianPath(start, substep, np.zeros(1), start[None, :].copy(), False, None, None)

    noise = rng.standard_normal((n_steps, start.size)) * math.sqrt(substep)
    uniforms = rng.random(n_steps) if bridge else None
    positions = np.concatenate([start[None, :], start + np.cumsum(noise, axis=0)])
    times = substep * np.arange(n_steps + 1)

    # 起点已在边界上视为 0 时刻命中
    if start[0] <= 0.0:
        positions[:] = start
        positions[:, 0] = 0.0
        return BrownianPath(start, substep, times, positions, True, 0.0, 0)
    hit, fraction = _crossing(positions[:-1, 0], positions[1:, 0], substep, uniforms)
    hits = np.flatnonzero(hit)
    if hits.size == 0:
        return BrownianPath(start, substep, times, positions, False, None, None)

    k = int(hits[0])
    s = float(fraction[k])
    exit_point = positions[k] + s * (positions[k + 1] - positions[k])
    exit_point[0] = 0.0
    positions[k + 1:] = exit_point
    return BrownianPath(start, substep, times, positions, True, (k + s) * substep, k + 1)


class BrownianObserver:
    """布朗批量推进的观察者接口"""

    def on_start(self, engine: "BrownianBatch"):
        pass

    def on_step(self, paths: np.ndarray, step: int, before: np.ndarray, after: np.ndarray):
        """一个子步：before → after（命中路径的 after 为出口点）"""

    def on_sample(self, paths: np.ndarray, step: int, positions: np.ndarray, dt: float):
        """每 sample_every 个子步，在仍活跃路径的当前位置采样一次（左端点黎曼和）"""

    def on_finish(self, engine: "BrownianBatch"):
        pass


class BrownianBatch:
    """
    一块布朗路径的向量化推进

    固定子步：每步 substep，每 sample_every 步采样一次被积函数。
    自适应子步（adaptive = c）：每条路径的步长取 clip(c·x₀², substep, max_substep)，
    远离边界时大步前进，靠近边界时退回到 substep；此时每步都采样。
    """

    def __init__(self, start, horizon: float, substep: float, n_paths: int,
                 rng: np.random.Generator, bridge: bool = True, sample_every: int = 1,
                 adaptive: Optional[float] = None, max_substep: Optional[float] = None):
        if substep <= 0:
            raise ValueError(f"子步长必须为正，当前 {substep}")
        if adaptive is not None and adaptive <= 0:
            raise ValueError(f"自适应系数必须为正，当前 {adaptive}")
        self.start = np.asarray(start, dtype=float)
        self.horizon = float(horizon)
        self.substep = substep
        self.adaptive = adaptive
        self.max_substep = max_substep if max_substep is not None else max(substep, horizon / 16.0)
        self.n_steps = int(math.floor(horizon / substep + 1e-9))
        self.n_paths = n_paths
        self.rng = rng
        self.bridge = bridge
        self.sample_every = 1 if adaptive else max(1, int(sample_every))
        self.positions = np.broadcast_to(self.start, (n_paths, self.start.size)).copy()
        self.time = np.zeros(n_paths)
        self.hit = np.zeros(n_paths, dtype=bool)
        self.hit_time = np.full(n_paths, np.nan)
        if self.start[0] <= 0.0:
            self.hit[:] = True
            self.hit_time[:] = 0.0
            self.positions[:, 0] = 0.0

    @property
    def censored(self) -> np.ndarray:
        """到达 horizon 仍未命中的路径"""
        return ~self.hit

    def _substeps(self, alive: np.ndarray, before: np.ndarray):
        if self.adaptive is None:
            return self.substep
        h = np.clip(self.adaptive * before[:, 0] ** 2, self.substep, self.max_substep)
        return np.minimum(h, self.horizon - self.time[alive])

    def run(self, observers: Sequence[BrownianObserver] = ()) -> "BrownianBatch":
        for observer in observers:
            observer.on_start(self)
        alive = np.flatnonzero(~self.hit)
        step = 0
        while alive.size:
            if self.adaptive is None and step >= self.n_steps:
                break
            before = self.positions[alive]
            h = self._substeps(alive, before)
            if step % self.sample_every == 0:
                if self.adaptive is None:
                    dt = min(self.sample_every, self.n_steps - step) * self.substep
                else:
                    dt = h
                for observer in observers:
                    observer.on_sample(alive, step, before, dt)
            scale = np.sqrt(h)
            noise = self.rng.standard_normal(before.shape)
            after = before + (scale[:, None] if np.ndim(scale) else scale) * noise
            uniforms = self.rng.random(alive.size) if self.bridge else None
            crossed, fraction = _crossing(before[:, 0], after[:, 0], h, uniforms)
            if crossed.any():
                exits = before[crossed] + fraction[crossed, None] * (after[crossed] - before[crossed])
                exits[:, 0] = 0.0
                after[crossed] = exits
                h_crossed = h[crossed] if np.ndim(h) else h
                self.hit[alive[crossed]] = True
                self.hit_time[alive[crossed]] = self.time[alive[crossed]] + fraction[crossed] * h_crossed
            for observer in observers:
                observer.on_step(alive, step, before, after)
            self.positions[alive] = after
            self.time[alive] += h
            keep = ~crossed
            if self.adaptive is not None:
                keep &= self.time[alive] < self.horizon * (1.0 - 1e-12)
            alive = alive[keep]
            step += 1
        logger.debug(f"布朗块完成: 路径数={self.n_paths}, 步数={step}, 命中比例={self.hit.mean():.4f}")
        for observer in observers:
            observer.on_finish(self)
        return self
