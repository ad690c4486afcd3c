"""
二进系统模块
包含二进区间/抛币与哈尔系数树上的算子
"""
from .core import (
    DyadicInterval,
    DyadicPoint,
    BitVectorPoint,
    StreamPoint,
    ROOT,
    children,
    parent,
    slice_of,
    layer_of,
    layer_generations,
    interval_at,
    toss,
    toss_split,
    haar,
    leaf_tosses,
    verify_sign_convention,
)
from .haar_ops import (
    HaarCoefficients,
    DyadicFunctionSamples,
    decompose,
    reconstruct,
    dyadic_hilbert,
    dyadic_riesz,
    root_projection,
    slice_projection,
    lp_norm,
    operator_norm_estimate,
    riesz_vector_norm_estimate,
    identity_operator,
    hilbert_operator,
    riesz_operator,
    riesz_vector_operator,
)

__all__ = [
    'DyadicInterval', 'DyadicPoint', 'BitVectorPoint', 'StreamPoint', 'ROOT',
    'children', 'parent', 'slice_of', 'layer_of', 'layer_generations',
    'interval_at', 'toss', 'toss_split', 'haar', 'leaf_tosses', 'verify_sign_convention',
    'HaarCoefficients', 'DyadicFunctionSamples', 'decompose', 'reconstruct',
    'dyadic_hilbert', 'dyadic_riesz', 'root_projection', 'slice_projection',
    'lp_norm', 'operator_norm_estimate', 'riesz_vector_norm_estimate',
    'identity_operator', 'hilbert_operator', 'riesz_operator', 'riesz_vector_operator',
]
