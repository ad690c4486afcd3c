"""
连续侧的确定性预言机：半空间泊松核、周期核求积、加权半空间配对积分

定向约定：被积式 ⟨A_i∇f, ∇g⟩ = −∂_i f ∂₀g + ∂₀f ∂_i g 时，
    ∫_Ω ⟨A_i∇f, ∇g⟩·2x₀ = −⟨R_i f, g⟩    （R_i 为乘子 −iξ_i/|ξ|）
布朗表示的条件期望同样收敛到 −R_i f。比较时统一乘以 HALF_SPACE_ORIENTATION。
"""
import logging
import math
from typing import Callable, Dict, Optional, Union

import numpy as np
from scipy import integrate, special

from ...core.exceptions import NonDecayingInputError
from .families import HarmonicFunction
from .grid import GridFunction, GridSpec, riesz_transform

logger = logging.getLogger(__name__)

HALF_SPACE_ORIENTATION = -1.0

BoundarySource = Union[GridFunction, HarmonicFunction]


def harmonic_measure_density(y: float, x, d: int) -> np.ndarray:
    """半空间泊松核 P_y(x) = Γ((d+1)/2)/π^{(d+1)/2}·y/(y²+|x|²)^{(d+1)/2}"""
    if y <= 0:
        raise ValueError(f"起始高度必须为正，当前 {y}")
    x = np.asarray(x, dtype=float)
    r2 = x * x if d == 1 and (x.ndim == 0 or x.shape[-1] != 1) else np.sum(x * x, axis=-1)
    log_constant = special.gammaln((d + 1) / 2.0) - (d + 1) / 2.0 * math.log(math.pi)
    return np.exp(log_constant) * y / (y * y + r2) ** ((d + 1) / 2.0)


def harmonic_measure_cdf_1d(y: float, x) -> np.ndarray:
    """d = 1 时出口点的分布函数（柯西分布）"""
    return 0.5 + np.arctan(np.asarray(x, dtype=float) / y) / math.pi


def periodic_poisson_kernel_1d(x0: float, s, L: float) -> np.ndarray:
    """周期 2L 的泊松核 (1/2L)·sinh(πx₀/L)/(cosh(πx₀/L) − cos(πs/L))"""
    a = math.pi * x0 / L
    return np.sinh(a) / (np.cosh(a) - np.cos(math.pi * np.asarray(s, dtype=float) / L)) / (2.0 * L)


def _periodize(fn: Callable[[float], float], L: float) -> Callable[[float], float]:
    return lambda t: fn(((t + L) % (2.0 * L)) - L)


def poisson_extension_quadrature_1d(fn: Callable[[float], float], x0: float, x: float, L: float) -> float:
    """周期泊松核直接求积，作为谱延拓的独立预言机"""
    periodic = _periodize(fn, L)
    value, _ = integrate.quad(lambda t: periodic_poisson_kernel_1d(x0, x - t, L) * periodic(t),
                              x - L, x + L, points=[x], limit=400, epsabs=1e-14, epsrel=1e-12)
    return value


def _cot_remainder(u: float, L: float) -> float:
    """cot(πu/2L)/(2L) − 1/(πu)，在 u = 0 附近用级数"""
    z = math.pi * u / (2.0 * L)
    if abs(z) < 1e-3:
        return -(z / 3.0 + z ** 3 / 45.0) / (2.0 * L)
    return 1.0 / (math.tan(z) * 2.0 * L) - 1.0 / (math.pi * u)


def periodic_hilbert_quadrature_1d(fn: Callable[[float], float], x: float, L: float) -> float:
    """
    周期希尔伯特变换的主值求积
    Hf(x) = (1/2L)·PV∫ f(t)·cot(π(x−t)/2L) dt
          = −(1/π)·PV∫ f(t)/(t−x) dt + ∫ f(t)·r(x−t) dt
    """
    periodic = _periodize(fn, L)
    principal, _ = integrate.quad(periodic, x - L, x + L, weight="cauchy", wvar=x, limit=400,
                                  epsabs=1e-14, epsrel=1e-12)
    smooth, _ = integrate.quad(lambda t: periodic(t) * _cot_remainder(x - t, L), x - L, x + L,
                               limit=400, epsabs=1e-14, epsrel=1e-12)
    return -principal / math.pi + smooth


def line_hilbert_quadrature_1d(fn: Callable[[float], float], x: float, cutoff: float = 60.0) -> float:
    """实直线上的希尔伯特变换主值求积（截断到 [x−cutoff, x+cutoff]）"""
    principal, _ = integrate.quad(fn, x - cutoff, x + cutoff, weight="cauchy", wvar=x, limit=400)
    return -principal / math.pi


def _as_grid(source: BoundarySource, spec: Optional[GridSpec]) -> GridFunction:
    if isinstance(source, GridFunction):
        return source
    if not getattr(source, "decaying", False):
        raise NonDecayingInputError(f"{type(source).__name__} 不衰减，半空间配对积分发散")
    if spec is None:
        spec = getattr(source, "grid", None) or GridSpec(source.d)
    return source.to_grid(spec)


def grid_riesz_pairing(f: BoundarySource, g: BoundarySource, i: int,
                       spec: Optional[GridSpec] = None) -> float:
    """网格上的 ⟨R_i f, g⟩"""
    f_grid = _as_grid(f, spec)
    g_grid = _as_grid(g, f_grid.spec)
    return riesz_transform(f_grid, i).inner(g_grid)


def gundy_varopoulos_pairing(f: BoundarySource, g: BoundarySource, i: int,
                             spec: Optional[GridSpec] = None, h0: float = 1e-3,
                             top: Optional[float] = None, per_octave: int = 16) -> Dict[str, float]:
    """
    ∫₀^∞ ∫ (−∂_i f ∂₀g + ∂₀f ∂_i g)·2x₀ dx dx₀

    高度取几何网格 [h₀/2, H]，对 s = log x₀ 用梯形公式；
    分别从 h₀ 与 h₀/2 起积分后做 Richardson 外推（缺失部分 ∝ h₀²）；
    H 以上的尾项用非直流模的衰减 e^{−x₀|ξ|} 给出上界。

    返回:
        {"value", "coarse", "fine", "tail_bound", "heights"}
    """
    f_grid = _as_grid(f, spec)
    g_grid = _as_grid(g, f_grid.spec)
    grid = f_grid.spec
    if top is None:
        top = 16.0 / grid.lowest_frequency

    norm = grid.wavenumber_norm()
    xi_i = grid.wavenumbers()[i - 1]
    f_hat, g_hat = f_grid.spectrum(), g_grid.spectrum()

    step = math.log(2.0) / per_octave
    start = math.log(h0 / 2.0)
    count = int(math.ceil((math.log(top) - start) / step)) + 1
    logs = start + step * np.arange(count)

    integrand = np.empty(count)
    for k, s in enumerate(logs):
        x0 = math.exp(s)
        damping = np.exp(-x0 * norm)
        d0_f = np.real(np.fft.ifftn(-norm * damping * f_hat))
        di_f = np.real(np.fft.ifftn(1j * xi_i * damping * f_hat))
        d0_g = np.real(np.fft.ifftn(-norm * damping * g_hat))
        di_g = np.real(np.fft.ifftn(1j * xi_i * damping * g_hat))
        density = np.sum(-di_f * d0_g + d0_f * di_g) * grid.cell_volume
        # dx₀ = x₀ ds
        integrand[k] = density * 2.0 * x0 * x0

    fine = float(integrate.trapezoid(integrand, logs))
    coarse = float(integrate.trapezoid(integrand[per_octave:], logs[per_octave:]))
    value = (4.0 * fine - coarse) / 3.0

    nonzero = norm > 0
    weight = grid.cell_volume / grid.M ** grid.d
    tail = np.abs(f_hat[nonzero]) * np.abs(g_hat[nonzero]) * \
        np.exp(-2.0 * top * norm[nonzero]) * (2.0 * top * norm[nonzero] + 1.0)
    tail_bound = float(weight * np.sum(tail))

    logger.debug(f"半空间配对: i={i}, 高度点数={count}, 值={value:.12g}, 尾项上界={tail_bound:.3g}")
    return {"value": value, "coarse": coarse, "fine": fine, "tail_bound": tail_bound,
            "heights": float(count)}
