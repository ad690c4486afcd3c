"""
实验公共部件：默认测试函数、游走参数、分块模拟与报告骨架
"""
import logging
import math
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from ...config.run_config import RunConfig
from ...models.experiment_models import ExperimentReport
from ...utils.parallel import concat_blocks, map_blocks
from ..harmonic.families import GaussianBump, HarmonicFunction
from ..harmonic.grid import GridSpec
from ..stochastics.batch import CoarseBatchEngine, FineBatchEngine, WalkObserver
from ..stochastics.brownian import BrownianBatch, BrownianObserver
from ..stochastics.coarse_kernel import CoarseKernel
from ..stochastics.rng import STREAM_BROWNIAN, STREAM_COARSE_WALK, STREAM_FINE_WALK, block_generator
from ..stochastics.walks import WalkConfig

logger = logging.getLogger(__name__)

# 测试函数 g 沿 e_i 的偏移
PAIR_OFFSET = 1.0

BlockResult = Dict[str, np.ndarray]


def new_report(name: str, cfg: RunConfig) -> ExperimentReport:
    return ExperimentReport(experiment=name, parameters=cfg.effective())


def walk_config(cfg: RunConfig, N: int, i: Optional[int] = None) -> WalkConfig:
    return WalkConfig(d=cfg.d, i=cfg.i if i is None else i, T=cfg.T, N=N, y=cfg.y,
                      mode=cfg.walk_mode, delta_value=cfg.delta,
                      theta_value=cfg.theta, eps_value=cfg.eps)


def grid_spec(cfg: RunConfig, d: Optional[int] = None) -> GridSpec:
    return GridSpec(cfg.d if d is None else d, cfg.L, cfg.M)


def unit_vector(d: int, j: int, length: float = 1.0) -> np.ndarray:
    v = np.zeros(d)
    v[j - 1] = length
    return v


def gaussian(d: int, center, spec: GridSpec) -> GaussianBump:
    return GaussianBump(np.asarray(center, dtype=float).reshape(d), width=1.0, grid=spec)


def default_pair(cfg: RunConfig, d: Optional[int] = None,
                 i: Optional[int] = None) -> Tuple[GaussianBump, GaussianBump]:
    """f 位于原点，g 沿 e_i 偏移 PAIR_OFFSET 的一对高斯"""
    d = cfg.d if d is None else d
    i = cfg.i if i is None else i
    spec = grid_spec(cfg, d)
    return gaussian(d, np.zeros(d), spec), gaussian(d, unit_vector(d, i, PAIR_OFFSET), spec)


def warm_up(functions: Sequence[HarmonicFunction], d: int):
    """在进入线程池之前完成惰性制表"""
    probe = np.zeros((1, d + 1))
    probe[0, 0] = 1.0
    for f in functions:
        f.gradient(probe)


def brownian_substep(cfg: RunConfig) -> float:
    """布朗子步长：默认取最粗分辨率粗步长的 1/64"""
    if cfg.substep is not None:
        return cfg.substep
    return walk_config(cfg, cfg.N[0]).theta / 64.0


def sample_stride(theta: float, substep: float) -> int:
    """使被积函数的采样间隔与粗步长 θ 一致"""
    return max(1, int(round(theta / substep)))


def middle_resolution(cfg: RunConfig) -> int:
    """单分辨率实验取 N 序列的中位数"""
    return cfg.N[len(cfg.N) // 2]


def run_walk_blocks(walk: WalkConfig, n_paths: int, seed: int,
                    make_observers: Callable[[], Sequence[WalkObserver]],
                    collect: Callable[[object, Sequence[WalkObserver]], BlockResult],
                    fine: bool = False, slices: Optional[Sequence[int]] = None,
                    stream: Optional[int] = None, threads: Optional[int] = None) -> BlockResult:
    """
    分块模拟游走

    参数:
        make_observers: 每块新建一组观察者
        collect: (引擎, 观察者) → 逐路径数组
        fine: True 用细引擎（可带族成员 slices），否则按精确转移核抽取粗步
    """
    if fine:
        stream = STREAM_FINE_WALK if stream is None else stream
        kernel = None
    else:
        stream = STREAM_COARSE_WALK if stream is None else stream
        kernel = CoarseKernel(walk.d, walk.i, walk.window)

    def block(index: int, start: int, stop: int) -> BlockResult:
        rng = block_generator(seed, index, stream)
        observers = list(make_observers())
        if fine:
            engine = FineBatchEngine(walk, stop - start, rng, slices)
        else:
            engine = CoarseBatchEngine(walk, stop - start, rng, kernel)
        engine.run(observers)
        return collect(engine, observers)

    results = concat_blocks(map_blocks(block, n_paths, threads))
    logger.info(f"游走模拟完成: d={walk.d}, i={walk.i}, N={walk.N}, 路径数={n_paths}, "
                f"{'细引擎' if fine else '粗引擎'}")
    return results


def run_brownian_blocks(start: np.ndarray, horizon: float, substep: float, n_paths: int, seed: int,
                        make_observers: Callable[[], Sequence[BrownianObserver]],
                        collect: Callable[[BrownianBatch, Sequence[BrownianObserver]], BlockResult],
                        bridge: bool = True, sample_every: int = 1, adaptive: Optional[float] = None,
                        max_substep: Optional[float] = None, stream: int = STREAM_BROWNIAN,
                        threads: Optional[int] = None) -> BlockResult:
    """分块模拟布朗运动，参数含义同 BrownianBatch"""

    def block(index: int, first: int, stop: int) -> BlockResult:
        rng = block_generator(seed, index, stream)
        observers = list(make_observers())
        engine = BrownianBatch(start, horizon, substep, stop - first, rng, bridge=bridge,
                               sample_every=sample_every, adaptive=adaptive, max_substep=max_substep)
        engine.run(observers)
        return collect(engine, observers)

    results = concat_blocks(map_blocks(block, n_paths, threads))
    logger.info(f"布朗模拟完成: 起点={np.round(start, 6).tolist()}, 时间上限={horizon}, "
                f"子步={substep:.3g}, 路径数={n_paths}")
    return results


def stopped_terminal(engine, _observers=()) -> BlockResult:
    """游走终点（族成员 0）"""
    return {"terminal": engine.positions[0].T.copy()}


def brownian_terminal(engine: BrownianBatch, _observers=()) -> BlockResult:
    return {"terminal": engine.positions.T.copy(), "hit": engine.hit.astype(float)}


def relative_error(value: float, target: float) -> float:
    if target == 0.0:
        return abs(value)
    return abs(value - target) / abs(target)


def finite(x: float) -> float:
    """报告中的非有限值记为 0（JSON 不接受 NaN）"""
    return float(x) if math.isfinite(x) else 0.0
