"""
计数器随机流
每个流由 (主种子, 流编号, 块编号) 作为 Philox 密钥，与线程数无关
"""
from typing import List, Tuple

import numpy as np

_MASK64 = (1 << 64) - 1

# 流编号：不同用途的随机数互不重叠
STREAM_FINE_WALK = 1
STREAM_COARSE_WALK = 2
STREAM_BROWNIAN = 3
STREAM_NORM_SEARCH = 4
STREAM_MOMENTS = 5
STREAM_BROWNIAN_SWAPPED = 6


def sweep_stream(stream: int, index: int) -> int:
    """扫描中第 index 个点使用的流编号（高 8 位放扫描序号）"""
    if not 0 <= index < 256:
        raise ValueError(f"扫描序号必须在 [0, 256) 内，当前 {index}")
    return (stream & 0xFF) | (index << 8)


def block_generator(master_seed: int, block: int, stream: int = 0) -> np.random.Generator:
    """第 block 块路径的随机数生成器"""
    key = np.array([master_seed & _MASK64, ((stream & 0xFFFF) << 48) | (block & ((1 << 48) - 1))],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def path_generator(master_seed: int, path_index: int, stream: int = 0) -> np.random.Generator:
    """单条路径的随机数生成器（单路径接口使用）"""
    key = np.array([master_seed & _MASK64, ((stream & 0xFFFF) << 48) | (1 << 47) | path_index],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def block_ranges(n_paths: int, block_size: int) -> List[Tuple[int, int, int]]:
    """固定块划分：[(块编号, 起始路径, 结束路径)]"""
    if block_size < 1:
        raise ValueError(f"块大小必须为正，当前 {block_size}")
    return [(b, start, min(start + block_size, n_paths))
            for b, start in enumerate(range(0, n_paths, block_size))]
