"""
鞅引擎模块
变换矩阵 A_i、离散鞅及其变换、精确结构恒等式与路径累加器
"""
from .engine import (
    transform_matrix,
    pairing_density,
    transform_increments,
    MartingaleSequence,
    martingale_f,
    martingale_transform,
    martingale_g,
    verify_cauchy_riemann,
    verify_transform_identity,
    hessian_bound,
    is_sibling_constant,
    continuous_pairing_accumulator,
    FineMartingaleObserver,
    CoarseMartingaleObserver,
    CoarsePairingObserver,
    BrownianPairingObserver,
    BrownianMartingaleObserver,
)

__all__ = [
    'transform_matrix', 'pairing_density', 'transform_increments',
    'MartingaleSequence', 'martingale_f', 'martingale_transform', 'martingale_g',
    'verify_cauchy_riemann', 'verify_transform_identity', 'hessian_bound', 'is_sibling_constant',
    'continuous_pairing_accumulator',
    'FineMartingaleObserver', 'CoarseMartingaleObserver', 'CoarsePairingObserver',
    'BrownianPairingObserver', 'BrownianMartingaleObserver',
]
