"""
随机过程模块
抛币驱动的离散游走、粗粒化与停止、批量引擎、布朗运动参考与精确枚举
"""
from .walks import (
    WalkConfig,
    WalkPath,
    CoarsePath,
    COUPLED,
    DECOUPLED,
    layer_increments,
    fine_increments,
    accumulate_positions,
    freeze_at_entry,
    simulate_fine_walk,
    simulate_walk_family,
    coarse_grain,
    apply_stopping,
    stop_walk,
)
from .coarse_kernel import CoarseKernel
from .batch import WalkObserver, BatchEngine, FineBatchEngine, CoarseBatchEngine
from .brownian import BrownianPath, BrownianObserver, BrownianBatch, sample_brownian
from .enumeration import EnumerationBatch, enumerate_walks, layer_increment_field, check_cap
from .rng import (
    block_generator,
    path_generator,
    block_ranges,
    sweep_stream,
    STREAM_FINE_WALK,
    STREAM_COARSE_WALK,
    STREAM_BROWNIAN,
    STREAM_BROWNIAN_SWAPPED,
    STREAM_NORM_SEARCH,
    STREAM_MOMENTS,
)

__all__ = [
    'WalkConfig', 'WalkPath', 'CoarsePath', 'COUPLED', 'DECOUPLED',
    'layer_increments', 'fine_increments', 'accumulate_positions', 'freeze_at_entry',
    'simulate_fine_walk', 'simulate_walk_family', 'coarse_grain', 'apply_stopping', 'stop_walk',
    'CoarseKernel',
    'WalkObserver', 'BatchEngine', 'FineBatchEngine', 'CoarseBatchEngine',
    'BrownianPath', 'BrownianObserver', 'BrownianBatch', 'sample_brownian',
    'EnumerationBatch', 'enumerate_walks', 'layer_increment_field', 'check_cap',
    'block_generator', 'path_generator', 'block_ranges', 'sweep_stream',
    'STREAM_FINE_WALK', 'STREAM_COARSE_WALK', 'STREAM_BROWNIAN', 'STREAM_BROWNIAN_SWAPPED',
    'STREAM_NORM_SEARCH', 'STREAM_MOMENTS',
]
