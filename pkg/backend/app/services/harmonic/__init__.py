"""
调和分析预言机模块
测试函数族、周期网格谱方法、延拓制表插值与半空间配对积分
"""
from .grid import (
    GridSpec,
    GridFunction,
    apply_multiplier,
    riesz_multiplier,
    extend_harmonic,
    riesz_transform,
    spectral_fields,
    trig_evaluate,
)
from .tables import HarmonicTable
from .families import (
    HarmonicFunction,
    PlaneWave,
    AffineHarmonic,
    GaussianBump,
    GridHarmonic,
    HarmonicSum,
    gradient_field,
)
from .oracle import (
    HALF_SPACE_ORIENTATION,
    harmonic_measure_density,
    harmonic_measure_cdf_1d,
    periodic_poisson_kernel_1d,
    poisson_extension_quadrature_1d,
    periodic_hilbert_quadrature_1d,
    line_hilbert_quadrature_1d,
    grid_riesz_pairing,
    gundy_varopoulos_pairing,
)

__all__ = [
    'GridSpec', 'GridFunction', 'apply_multiplier', 'riesz_multiplier', 'extend_harmonic',
    'riesz_transform', 'spectral_fields', 'trig_evaluate',
    'HarmonicTable',
    'HarmonicFunction', 'PlaneWave', 'AffineHarmonic', 'GaussianBump', 'GridHarmonic',
    'HarmonicSum', 'gradient_field',
    'HALF_SPACE_ORIENTATION', 'harmonic_measure_density', 'harmonic_measure_cdf_1d',
    'periodic_poisson_kernel_1d', 'poisson_extension_quadrature_1d',
    'periodic_hilbert_quadrature_1d', 'line_hilbert_quadrature_1d',
    'grid_riesz_pairing', 'gundy_varopoulos_pairing',
]
