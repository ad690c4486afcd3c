"""
测试函数族及其调和延拓
点的坐标约定 (x₀, x₁, …, x_d)，x₀ 为竖直方向（高度）
"""
from __future__ import annotations

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy import special

from ...core.exceptions import ConfigError, EvaluationDomainError
from .grid import GridFunction, GridSpec, trig_evaluate
from .tables import HarmonicTable

logger = logging.getLogger(__name__)

_SQRT2 = math.sqrt(2.0)
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


def _as_points(points, d: int) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.shape[-1] != d + 1:
        raise ConfigError(f"求值点应有 {d + 1} 个坐标，实际 {points.shape[-1]}")
    return points


class HarmonicFunction:
    """上半空间中的调和函数：延拓值与梯度"""

    d: int = 1
    decaying: bool = False

    def value(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def boundary(self, x: np.ndarray) -> np.ndarray:
        """边界值 f(x)，x 形状 (..., d)"""
        x = np.asarray(x, dtype=float)
        points = np.concatenate([np.zeros(x.shape[:-1] + (1,)), x], axis=-1)
        return self.value(points)

    def to_grid(self, spec: GridSpec) -> GridFunction:
        return GridFunction.from_callable(spec, self.boundary)

    def __add__(self, other: "HarmonicFunction") -> "HarmonicSum":
        return HarmonicSum([self, other], [1.0, 1.0])

    def scale(self, factor: float) -> "HarmonicSum":
        return HarmonicSum([self], [factor])


class PlaneWave(HarmonicFunction):
    """a·e^{−x₀|ξ|}·cos(⟨ξ,x⟩+φ)"""

    def __init__(self, frequency: Sequence[float], phase: float = 0.0, amplitude: float = 1.0):
        self.frequency = np.asarray(frequency, dtype=float)
        self.norm = float(np.linalg.norm(self.frequency))
        if self.norm == 0.0:
            raise ConfigError("平面波频率不能为零向量")
        self.d = self.frequency.size
        self.phase = float(phase)
        self.amplitude = float(amplitude)

    def _parts(self, points):
        points = _as_points(points, self.d)
        envelope = self.amplitude * np.exp(-points[..., 0] * self.norm)
        argument = points[..., 1:] @ self.frequency + self.phase
        return envelope, argument

    def value(self, points):
        envelope, argument = self._parts(points)
        return envelope * np.cos(argument)

    def gradient(self, points):
        envelope, argument = self._parts(points)
        cosine = envelope * np.cos(argument)
        sine = envelope * np.sin(argument)
        return np.concatenate([(-self.norm * cosine)[..., None],
                               -sine[..., None] * self.frequency], axis=-1)

    def riesz_boundary(self, x: np.ndarray, j: int) -> np.ndarray:
        """R_j f(x) = a·(ξ_j/|ξ|)·sin(⟨ξ,x⟩+φ)"""
        x = np.asarray(x, dtype=float)
        return self.amplitude * self.frequency[j - 1] / self.norm * np.sin(x @ self.frequency + self.phase)


class AffineHarmonic(HarmonicFunction):
    """c + ⟨b, (x₀, x)⟩，梯度为常数"""

    def __init__(self, constant: float, slope: Sequence[float]):
        self.constant = float(constant)
        self.slope = np.asarray(slope, dtype=float)
        self.d = self.slope.size - 1

    @classmethod
    def constant_function(cls, value: float, d: int) -> "AffineHarmonic":
        return cls(value, np.zeros(d + 1))

    @classmethod
    def coordinate(cls, j: int, d: int) -> "AffineHarmonic":
        """f = x_j"""
        slope = np.zeros(d + 1)
        slope[j] = 1.0
        return cls(0.0, slope)

    def value(self, points):
        points = _as_points(points, self.d)
        return self.constant + points @ self.slope

    def gradient(self, points):
        points = _as_points(points, self.d)
        return np.broadcast_to(self.slope, points.shape).copy()


class GaussianBump(HarmonicFunction):
    """
    边界值 a·exp(−|x−c|²/(2σ²))
    d = 1 时延拓有闭式：a·Re w(((x−c) + i x₀)/(σ√2))，w 为 Faddeeva 函数；
    d ≥ 2 时在周期网格上谱延拓后制表插值
    """

    decaying = True

    def __init__(self, center: Sequence[float], width: float = 1.0, amplitude: float = 1.0,
                 grid: Optional[GridSpec] = None, table_height: float = 16.0,
                 table_levels: int = 129, table_points: int = 128):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        self.d = self.center.size
        if width <= 0:
            raise ConfigError(f"高斯宽度必须为正，当前 {width}")
        self.width = float(width)
        self.amplitude = float(amplitude)
        self.grid = grid or GridSpec(self.d)
        self._table_args = (table_height, table_levels, table_points)
        self._table: Optional[HarmonicTable] = None

    def boundary(self, x):
        x = np.asarray(x, dtype=float)
        r2 = np.sum((x - self.center) ** 2, axis=-1)
        return self.amplitude * np.exp(-r2 / (2.0 * self.width ** 2))

    def _z(self, points):
        points = _as_points(points, self.d)
        scale = self.width * _SQRT2
        return ((points[..., 1] - self.center[0]) + 1j * points[..., 0]) / scale

    @property
    def table(self) -> HarmonicTable:
        if self._table is None:
            height, levels, points = self._table_args
            self._table = HarmonicTable(self.to_grid(self.grid), height, levels, points)
        return self._table

    def value(self, points):
        if self.d == 1:
            return self.amplitude * np.real(special.wofz(self._z(points)))
        points = _as_points(points, self.d)
        flat = points.reshape(-1, self.d + 1)
        return self.table.value(flat).reshape(points.shape[:-1])

    def gradient(self, points):
        if self.d == 1:
            z = self._z(points)
            derivative = -2.0 * z * special.wofz(z) + 1j * _TWO_OVER_SQRT_PI
            factor = self.amplitude / (self.width * _SQRT2)
            return np.stack([-factor * np.imag(derivative), factor * np.real(derivative)], axis=-1)
        points = _as_points(points, self.d)
        flat = points.reshape(-1, self.d + 1)
        return self.table.gradient(flat).reshape(points.shape)

    def hilbert_boundary(self, x: np.ndarray) -> np.ndarray:
        """d = 1：Hf(x) = a·(2/√π)·D((x−c)/(σ√2))，D 为 Dawson 函数"""
        if self.d != 1:
            raise ConfigError("闭式希尔伯特变换只适用于 d = 1")
        x = np.asarray(x, dtype=float)
        return self.amplitude * _TWO_OVER_SQRT_PI * special.dawsn((x - self.center[0]) / (self.width * _SQRT2))

    def conjugate(self, points: np.ndarray) -> np.ndarray:
        """d = 1：共轭调和函数 v = a·Im w(z)，边界值为 Hf"""
        if self.d != 1:
            raise ConfigError("共轭调和函数闭式只适用于 d = 1")
        return self.amplitude * np.imag(special.wofz(self._z(points)))


class GridHarmonic(HarmonicFunction):
    """网格函数的延拓：method="table" 三次样条表，"trig" 精确三角插值"""

    decaying = True

    def __init__(self, f: GridFunction, method: str = "table", table_height: float = 16.0,
                 table_levels: int = 129, table_points: int = 128):
        if method not in ("table", "trig"):
            raise ConfigError(f"未知插值方法: {method}")
        self.grid_function = f
        self.d = f.d
        self.method = method
        self._table_args = (table_height, table_levels, table_points)
        self._table: Optional[HarmonicTable] = None

    @property
    def table(self) -> HarmonicTable:
        if self._table is None:
            self._table = HarmonicTable(self.grid_function, *self._table_args)
        return self._table

    def _evaluate(self, points, components):
        points = _as_points(points, self.d)
        flat = points.reshape(-1, self.d + 1)
        if self.method == "trig":
            result = trig_evaluate(self.grid_function, flat)[:, components]
        else:
            result = self.table.evaluate(flat, components)
        return result, points.shape[:-1]

    def value(self, points):
        result, shape = self._evaluate(points, [0])
        return result[:, 0].reshape(shape)

    def gradient(self, points):
        result, shape = self._evaluate(points, list(range(1, self.d + 2)))
        return result.reshape(shape + (self.d + 1,))

    def to_grid(self, spec: GridSpec) -> GridFunction:
        if spec == self.grid_function.spec:
            return self.grid_function
        return super().to_grid(spec)


class HarmonicSum(HarmonicFunction):
    """线性组合 Σ w_k f_k"""

    def __init__(self, terms: List[HarmonicFunction], weights: Sequence[float]):
        if not terms:
            raise ConfigError("线性组合至少需要一项")
        dims = {term.d for term in terms}
        if len(dims) != 1:
            raise ConfigError(f"各项维数不一致: {dims}")
        self.terms = list(terms)
        self.weights = [float(w) for w in weights]
        self.d = terms[0].d
        self.decaying = all(term.decaying for term in terms)

    def value(self, points):
        return sum(w * term.value(points) for w, term in zip(self.weights, self.terms))

    def gradient(self, points):
        return sum(w * term.gradient(points) for w, term in zip(self.weights, self.terms))

    def boundary(self, x):
        return sum(w * term.boundary(x) for w, term in zip(self.weights, self.terms))

    def to_grid(self, spec: GridSpec) -> GridFunction:
        values = sum(w * term.to_grid(spec).values for w, term in zip(self.weights, self.terms))
        return GridFunction(spec, values)


def gradient_field(source, points) -> np.ndarray:
    """
    梯度 (∂₀u, ∂₁u, …, ∂_d u)
    解析族用闭式，网格函数用谱导数加精确三角插值
    """
    if isinstance(source, GridFunction):
        source = GridHarmonic(source, method="trig")
    points = _as_points(points, source.d)
    if np.any(points[..., 0] < 0):
        raise EvaluationDomainError("梯度只能在闭上半空间内求值")
    return source.gradient(points)
