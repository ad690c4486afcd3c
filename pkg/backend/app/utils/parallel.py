"""
按固定块并行模拟路径
块划分与每块的随机流只由 (种子, 块编号) 决定，结果按块顺序拼接，与线程数无关
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, TypeVar

import numpy as np

from ..core.config import settings
from ..services.stochastics.rng import block_ranges

logger = logging.getLogger(__name__)

R = TypeVar("R")


def map_blocks(fn: Callable[[int, int, int], R], n_paths: int, threads: Optional[int] = None,
               block_size: Optional[int] = None) -> List[R]:
    """
    对每个块调用 fn(块编号, 起始路径, 结束路径)

    返回:
        按块编号排列的结果列表
    """
    threads = max(1, settings.THREADS if threads is None else threads)
    block_size = settings.BLOCK_SIZE if block_size is None else block_size
    blocks = block_ranges(n_paths, block_size)
    logger.debug(f"路径分块: 路径数={n_paths}, 块数={len(blocks)}, 线程数={threads}")
    if threads == 1 or len(blocks) <= 1:
        return [fn(*block) for block in blocks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map 按提交顺序返回
        return list(pool.map(lambda block: fn(*block), blocks))


def concat_blocks(results: List[Dict[str, np.ndarray]], axis: int = -1) -> Dict[str, np.ndarray]:
    """把各块的逐路径数组沿路径轴拼接"""
    if not results:
        return {}
    return {key: np.concatenate([r[key] for r in results], axis=axis) for key in results[0]}
