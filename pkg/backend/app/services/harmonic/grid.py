"""
周期网格上的谱方法：调和延拓、黎兹变换、谱梯度与三角插值

网格点 x_n = −L + n·h，h = 2L/M，每个坐标轴 M 个点（2 的幂）。
角频率 ξ = 2π·fftfreq(M, h)；延拓乘子 e^{−x₀|ξ|}，黎兹乘子 −iξ_j/|ξ|（直流取 0）。
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np

from ...core.exceptions import ConfigError, EvaluationDomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridSpec:
    """周期盒 [−L, L)^d 上 M^d 个网格点"""
    d: int
    L: float = 20.0
    M: int = 256

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ConfigError(f"网格只支持 d ∈ {{1,2,3}}，当前 {self.d}")
        if self.M < 2 or self.M & (self.M - 1):
            raise ConfigError(f"每轴点数 M 必须是 2 的幂，当前 {self.M}")
        if self.L <= 0:
            raise ConfigError(f"盒半宽 L 必须为正，当前 {self.L}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.M

    @property
    def cell_volume(self) -> float:
        return self.h ** self.d

    @property
    def shape(self):
        return (self.M,) * self.d

    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.M)

    def mesh(self) -> List[np.ndarray]:
        return np.meshgrid(*([self.axis()] * self.d), indexing="ij")

    def points(self) -> np.ndarray:
        """全部网格点，形状 (M, …, M, d)"""
        return np.stack(self.mesh(), axis=-1)

    def wavenumbers(self) -> List[np.ndarray]:
        frequencies = 2.0 * np.pi * np.fft.fftfreq(self.M, d=self.h)
        return np.meshgrid(*([frequencies] * self.d), indexing="ij")

    def wavenumber_norm(self) -> np.ndarray:
        return np.sqrt(sum(k * k for k in self.wavenumbers()))

    @property
    def lowest_frequency(self) -> float:
        return np.pi / self.L


@dataclass
class GridFunction:
    """周期网格上的采样函数"""
    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.spec.shape:
            raise ConfigError(f"取值形状 {self.values.shape} 与网格 {self.spec.shape} 不符")

    @classmethod
    def from_callable(cls, spec: GridSpec, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        """fn 接收 (..., d) 的点数组"""
        return cls(spec, fn(spec.points()))

    @property
    def d(self) -> int:
        return self.spec.d

    def spectrum(self) -> np.ndarray:
        return np.fft.fftn(self.values)

    def inner(self, other: "GridFunction") -> float:
        return float(np.sum(self.values * other.values) * self.spec.cell_volume)

    def l2_norm(self) -> float:
        return float(np.sqrt(self.inner(self)))

    def mean(self) -> float:
        return float(np.mean(self.values))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.spec, self.values + other.values)

    def __sub__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.spec, self.values - other.values)

    def scale(self, factor: float) -> "GridFunction":
        return GridFunction(self.spec, factor * self.values)


def apply_multiplier(f: GridFunction, multiplier: np.ndarray) -> GridFunction:
    return GridFunction(f.spec, np.real(np.fft.ifftn(f.spectrum() * multiplier)))


def riesz_multiplier(spec: GridSpec, j: int) -> np.ndarray:
    if not 1 <= j <= spec.d:
        raise ConfigError(f"黎兹变换坐标 j={j} 不在 [1, {spec.d}] 内")
    xi = spec.wavenumbers()[j - 1]
    norm = spec.wavenumber_norm()
    with np.errstate(divide="ignore", invalid="ignore"):
        multiplier = np.where(norm > 0, -1j * xi / np.where(norm > 0, norm, 1.0), 0.0)
    return multiplier


def extend_harmonic(f: GridFunction, heights: Sequence[float]) -> List[GridFunction]:
    """各高度 x₀ 上的调和延拓（x₀ = 0 为恒等）"""
    heights = [float(x0) for x0 in heights]
    if any(x0 < 0 for x0 in heights):
        raise EvaluationDomainError(f"延拓高度必须非负: {heights}")
    spectrum = f.spectrum()
    norm = f.spec.wavenumber_norm()
    return [GridFunction(f.spec, np.real(np.fft.ifftn(spectrum * np.exp(-x0 * norm)))) for x0 in heights]


def riesz_transform(f: GridFunction, j: int) -> GridFunction:
    """乘子 −iξ_j/|ξ|，直流分量置 0"""
    return apply_multiplier(f, riesz_multiplier(f.spec, j))


def spectral_fields(f: GridFunction, height: float) -> List[GridFunction]:
    """高度 x₀ 处的 [u, ∂₀u, ∂₁u, …, ∂_d u]"""
    if height < 0:
        raise EvaluationDomainError(f"高度必须非负: {height}")
    spectrum = f.spectrum()
    norm = f.spec.wavenumber_norm()
    damped = spectrum * np.exp(-height * norm)
    fields = [damped, -norm * damped]
    fields.extend(1j * xi * damped for xi in f.spec.wavenumbers())
    return [GridFunction(f.spec, np.real(np.fft.ifftn(field))) for field in fields]


def trig_evaluate(f: GridFunction, points: np.ndarray, chunk: int = 64) -> np.ndarray:
    """
    三角插值的精确离网求值（每个点 O(M^d)，适合少量点）

    参数:
        points: (P, d+1)，第 0 列为高度

    返回:
        (P, d+2)：[u, ∂₀u, ∂₁u, …, ∂_d u]
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if np.any(points[:, 0] < 0):
        raise EvaluationDomainError("三角插值求值点必须在闭上半空间内")
    spec = f.spec
    spectrum = f.spectrum().reshape(-1) / spec.M ** spec.d
    wavenumbers = np.stack([k.reshape(-1) for k in spec.wavenumbers()], axis=1)
    norm = np.sqrt(np.sum(wavenumbers ** 2, axis=1))
    out = np.empty((points.shape[0], spec.d + 2))
    for begin in range(0, points.shape[0], chunk):
        block = points[begin:begin + chunk]
        phase = np.exp(1j * (block[:, 1:] + spec.L) @ wavenumbers.T)
        damped = phase * np.exp(-np.outer(block[:, 0], norm)) * spectrum
        out[begin:begin + chunk, 0] = np.real(damped.sum(axis=1))
        out[begin:begin + chunk, 1] = np.real(damped @ (-norm))
        for j in range(spec.d):
            out[begin:begin + chunk, 2 + j] = np.real(damped @ (1j * wavenumbers[:, j]))
    return out
