"""
批量游走引擎

一块路径按粗步推进：细引擎逐层生成精确的细增量（同一抛币流可驱动整族游走），
粗引擎直接从转移核按精确分布抽取粗增量。ε 带在细步分辨率上检查：
块内第一次进入之后的细增量置零，随后的粗时刻检查把路径移出活跃集合。
观察者在推进过程中累加鞅和、黎曼和等路径泛函。
"""
import logging
from typing import Optional, Sequence

import numpy as np

from .coarse_kernel import CoarseKernel
from .walks import WalkConfig, fine_increments, freeze_at_entry

logger = logging.getLogger(__name__)


class WalkObserver:
    """路径泛函累加器接口，默认实现什么也不做"""

    def on_start(self, engine: "BatchEngine"):
        pass

    def on_fine_block(self, member: int, paths: np.ndarray, pre_positions: np.ndarray,
                      increments: np.ndarray):
        """
        一个粗步内的全部细步（只含仍活跃的路径）

        参数:
            member: 游走族成员序号（对应 i = slices[member]）
            paths: 块内路径编号
            pre_positions: (P, window, d+1) 各细步之前的位置 B_{k−1}
            increments: (P, window, d+1) 细增量 dB_k
        """

    def on_coarse_step(self, member: int, paths: np.ndarray, n: int, positions: np.ndarray):
        """第 n 个粗步之前（n < n_ε）的位置 X_n"""

    def on_finish(self, engine: "BatchEngine"):
        pass


class BatchEngine:
    """一块路径的游走族"""

    def __init__(self, cfg: WalkConfig, n_paths: int, rng: np.random.Generator,
                 slices: Optional[Sequence[int]] = None):
        self.cfg = cfg
        self.n_paths = n_paths
        self.rng = rng
        self.slices = list(slices) if slices is not None else [cfg.i]
        members = len(self.slices)
        self.positions = np.broadcast_to(cfg.start, (members, n_paths, cfg.d + 1)).copy()
        self.active = np.ones((members, n_paths), dtype=bool)
        self.stop_index = np.full((members, n_paths), cfg.coarse_steps, dtype=np.int64)
        # 第 0 代抛币只作为选择子
        self.last_toss = (2 * rng.integers(0, 2, size=n_paths, dtype=np.int8) - 1).astype(np.int8)
        self.coarse_done = 0

    def _coarse_check(self, n: int):
        """粗步 n 之后检查是否进入 ε 带"""
        entered = self.active & (self.positions[:, :, 0] <= self.cfg.eps)
        self.stop_index[entered] = n
        self.active &= ~entered

    def _notify_coarse(self, observers, n: int):
        for member in range(len(self.slices)):
            rows = np.flatnonzero(self.active[member])
            if rows.size:
                for observer in observers:
                    observer.on_coarse_step(member, rows, n, self.positions[member, rows])

    def run(self, observers: Sequence[WalkObserver] = ()) -> "BatchEngine":
        for observer in observers:
            observer.on_start(self)
        self._coarse_check(0)
        for n in range(self.cfg.coarse_steps):
            if not self.active.any():
                break
            self._notify_coarse(observers, n)
            self._advance(observers)
            self.coarse_done = n + 1
            self._coarse_check(n + 1)
        for observer in observers:
            observer.on_finish(self)
        return self

    def _advance(self, observers):
        raise NotImplementedError


class FineBatchEngine(BatchEngine):
    """逐层生成细增量；族内成员共享同一抛币流"""

    def _advance(self, observers):
        cfg = self.cfg
        alive = np.flatnonzero(self.active.any(axis=0))
        fresh = (2 * self.rng.integers(0, 2, size=(alive.size, cfg.window * cfg.d),
                                       dtype=np.int8) - 1).astype(np.int8)
        tosses = np.concatenate([self.last_toss[alive, None], fresh], axis=1)
        for member, i in enumerate(self.slices):
            live = self.active[member, alive]
            if not live.any():
                continue
            rows = alive[live]
            start = self.positions[member, rows][:, None, :]
            increments, _ = freeze_at_entry(start[:, 0], fine_increments(tosses[live], cfg.d, i, cfg.step_size),
                                            cfg.eps)
            partial = np.cumsum(increments, axis=1)
            pre_positions = np.concatenate([start, start + partial[:, :-1]], axis=1)
            for observer in observers:
                observer.on_fine_block(member, rows, pre_positions, increments)
            self.positions[member, rows] = start[:, 0] + partial[:, -1]
        self.last_toss[alive] = fresh[:, -1]


class CoarseBatchEngine(BatchEngine):
    """
    从精确转移核抽取粗增量（单条游走，不提供细步）

    竖直坐标离 ε 带超过一个粗步上界的路径本步不可能进入，按转移核抽样；
    其余路径逐细步生成并在第一次进入处冻结
    """

    def __init__(self, cfg: WalkConfig, n_paths: int, rng: np.random.Generator,
                 kernel: Optional[CoarseKernel] = None):
        super().__init__(cfg, n_paths, rng)
        self.kernel = kernel or CoarseKernel(cfg.d, cfg.i, cfg.window)

    def _advance(self, observers):
        cfg = self.cfg
        rows = np.flatnonzero(self.active[0])
        far = self.positions[0, rows, 0] - cfg.coarse_step_bound > cfg.eps
        if far.any():
            picked = rows[far]
            displacement, last = self.kernel.sample(self.last_toss[picked], self.rng)
            self.positions[0, picked] += displacement * cfg.step_size
            self.last_toss[picked] = last
        near = rows[~far]
        if near.size:
            fresh = (2 * self.rng.integers(0, 2, size=(near.size, cfg.window * cfg.d),
                                           dtype=np.int8) - 1).astype(np.int8)
            tosses = np.concatenate([self.last_toss[near, None], fresh], axis=1)
            increments, _ = freeze_at_entry(self.positions[0, near],
                                            fine_increments(tosses, cfg.d, cfg.i, cfg.step_size), cfg.eps)
            self.positions[0, near] += increments.sum(axis=1)
            self.last_toss[near] = fresh[:, -1]
