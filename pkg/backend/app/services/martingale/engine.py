"""
离散鞅、鞅变换与连续侧累加器

变换矩阵按列作用：A_i e₀ = e_i，A_i e_i = −e₀，其余基向量映为 0。
行向量读法下即 e₀A_i = −e_i、e_iA_i = e₀，A_i^T 满足 e₀A_i^T = e_i、e_iA_i^T = −e₀。
于是 ⟨A_i∇f, ∇g⟩ = −∂_i f ∂₀g + ∂₀f ∂_i g，且 S_i dB_k = A_i^T dB_k 逐点成立。

M_k^{(i),f} = f(B₀) + Σ_{ℓ≤k} ∇f(B_{ℓ−1})·dB_ℓ
M_k^{(i),i} =         Σ_{ℓ≤k} A_i∇f(B_{ℓ−1})·dB_ℓ = Σ ∇f(B_{ℓ−1})·A_i^T dB_ℓ
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from ...core.config import TOLERANCES
from ...core.exceptions import RieszLabError
from ..dyadic.haar_ops import DyadicFunctionSamples, decompose, dyadic_riesz, reconstruct
from ..harmonic.families import AffineHarmonic, HarmonicFunction, HarmonicSum, PlaneWave, gradient_field
from ..stochastics.batch import BatchEngine, WalkObserver
from ..stochastics.brownian import BrownianBatch, BrownianObserver, BrownianPath
from ..stochastics.enumeration import enumerate_walks, layer_increment_field
from ..stochastics.walks import WalkConfig, WalkPath

logger = logging.getLogger(__name__)

PLAIN = "plain"
TRANSFORMED = "transformed"
TEST = "test"


def transform_matrix(i: int, d: int) -> np.ndarray:
    """(d+1)×(d+1) 矩阵 A_i"""
    if not 1 <= i <= d:
        raise RieszLabError(f"变换编号 i={i} 不在 [1, {d}] 内")
    matrix = np.zeros((d + 1, d + 1))
    matrix[i, 0] = 1.0
    matrix[0, i] = -1.0
    return matrix


def pairing_density(grad_f: np.ndarray, grad_g: np.ndarray, i: int) -> np.ndarray:
    """⟨A_i∇f, ∇g⟩ = −∂_i f ∂₀g + ∂₀f ∂_i g，沿最后一个轴"""
    return -grad_f[..., i] * grad_g[..., 0] + grad_f[..., 0] * grad_g[..., i]


def transform_increments(gradients: np.ndarray, increments: np.ndarray, i: int,
                         check: bool = True) -> np.ndarray:
    """
    A_i∇f·dB，同时用 ∇f·A_i^T dB 复核

    参数:
        gradients, increments: (..., d+1)
    """
    matrix = transform_matrix(i, gradients.shape[-1] - 1)
    direct = np.sum((gradients @ matrix.T) * increments, axis=-1)
    if check:
        adjoint = np.sum(gradients * (increments @ matrix), axis=-1)
        scale = max(1.0, float(np.max(np.abs(gradients), initial=0.0)) *
                    float(np.max(np.abs(increments), initial=0.0)))
        gap = float(np.max(np.abs(direct - adjoint), initial=0.0))
        if gap > TOLERANCES["duality"] * scale:
            raise RieszLabError(f"转置对偶检查失败: 最大偏差 {gap:.3e}")
    return direct


@dataclass
class MartingaleSequence:
    """沿一条细游走的离散鞅 M_0 … M_K"""
    values: np.ndarray
    kind: str
    path: WalkPath
    i: Optional[int] = None

    @property
    def stop_index(self) -> int:
        return self.path.stop_fine_index

    @property
    def terminal(self) -> float:
        return float(self.values[-1])

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)


def _path_gradients(path: WalkPath, f: HarmonicFunction) -> np.ndarray:
    """停止之前各细步的 ∇f(B_{k−1})，停止之后为 0"""
    gradients = np.zeros_like(path.increments)
    live = path.stop_fine_index
    if live > 0:
        gradients[:live] = gradient_field(f, path.positions[:live])
    return gradients


def martingale_f(path: WalkPath, f: HarmonicFunction) -> MartingaleSequence:
    """M^{(i),f}：前向欧拉随机和，停止后冻结"""
    start = float(f.value(path.positions[0]))
    gradients = _path_gradients(path, f)
    steps = np.sum(gradients * path.increments, axis=-1)
    values = start + np.concatenate([[0.0], np.cumsum(steps)])
    return MartingaleSequence(values, PLAIN, path, path.config.i)


def martingale_transform(path: WalkPath, f: HarmonicFunction, i: Optional[int] = None) -> MartingaleSequence:
    """M^{(i),i}：被积函数 A_i∇f，M₀ = 0"""
    i = path.config.i if i is None else i
    gradients = _path_gradients(path, f)
    steps = transform_increments(gradients, path.increments, i)
    values = np.concatenate([[0.0], np.cumsum(steps)])
    return MartingaleSequence(values, TRANSFORMED, path, i)


def martingale_g(path: WalkPath, g: HarmonicFunction) -> MartingaleSequence:
    """测试函数 g 的鞅 M^{(i),g}"""
    sequence = martingale_f(path, g)
    sequence.kind = TEST
    return sequence


def _refine(values: np.ndarray, depth: int, target: Optional[int]) -> DyadicFunctionSamples:
    if target is None or target == depth:
        return DyadicFunctionSamples(depth, values)
    if target < depth:
        raise RieszLabError(f"嵌入深度 {target} 小于阶梯函数深度 {depth}")
    return DyadicFunctionSamples(target, np.repeat(values, 1 << (target - depth), axis=0))


def _riesz_of_samples(samples: DyadicFunctionSamples, i: int, d: int) -> np.ndarray:
    return reconstruct(dyadic_riesz(i, d, decompose(samples))).values


def verify_cauchy_riemann(cfg: WalkConfig, k: int, depth: Optional[int] = None,
                          cap: Optional[int] = None) -> float:
    """
    把 dB_k 的每个分量看作 x 的二进阶梯函数，逐分量作用 S_i，
    返回所有叶子上 |S_i dB_k − A_i^T dB_k| 的最大值（应为 0）
    """
    field = layer_increment_field(cfg, k, cap)
    n_tosses = k * cfg.d + 1
    samples = _refine(field, n_tosses, depth)
    transformed = _riesz_of_samples(samples, cfg.i, cfg.d)
    expected = samples.values @ transform_matrix(cfg.i, cfg.d)
    error = float(np.max(np.abs(transformed - expected)))
    logger.debug(f"柯西-黎曼关系: d={cfg.d}, i={cfg.i}, k={k}, 最大偏差={error:.3e}")
    return error


def hessian_bound(f: HarmonicFunction, points: np.ndarray, step: float = 1e-4) -> float:
    """
    max‖D²f‖ 的上界
    平面波用闭式 a|ξ|²，仿射函数为 0，其余用梯度的中心差分（Frobenius 范数）
    """
    if isinstance(f, AffineHarmonic):
        return 0.0
    if isinstance(f, PlaneWave):
        return abs(f.amplitude) * f.norm ** 2
    if isinstance(f, HarmonicSum):
        return sum(abs(w) * hessian_bound(term, points, step) for w, term in zip(f.weights, f.terms))
    points = np.asarray(points, dtype=float).reshape(-1, f.d + 1)
    squares = np.zeros(points.shape[0])
    for axis in range(f.d + 1):
        shift = np.zeros(f.d + 1)
        shift[axis] = step
        # 竖直方向在边界附近用单侧差分
        lower = points - shift
        lower[:, 0] = np.maximum(lower[:, 0], 0.0)
        upper = points + shift
        column = (f.gradient(upper) - f.gradient(lower)) / (upper[:, axis] - lower[:, axis])[:, None]
        squares += np.sum(column ** 2, axis=1)
    return float(1.5 * np.sqrt(np.max(squares)))


def is_sibling_constant(f: HarmonicFunction, cfg: WalkConfig, k: int) -> bool:
    """S_i M^f = M^i 逐叶精确成立的情形：i ≥ 2、k = 1 或 ∇f 为常数"""
    return cfg.i >= 2 or k == 1 or isinstance(f, AffineHarmonic) or \
        (isinstance(f, HarmonicSum) and all(isinstance(t, AffineHarmonic) for t in f.terms))


def verify_transform_identity(cfg: WalkConfig, k: int, f: HarmonicFunction,
                              depth: Optional[int] = None, cap: Optional[int] = None) -> Dict[str, Any]:
    """
    枚举得到 M_k^{(i),f} 与 M_k^{(i),i} 的阶梯函数，比较 S_i M_k^{(i),f} 与 M_k^{(i),i}

    i = 1 且 k ≥ 2 时，第 ℓ 层的兄弟交换翻转了 ε_{(ℓ−1)d}，
    ∇f(B_{ℓ−1}) 因此变化，逐叶偏差不超过 4δ(k−1)·max‖D²f‖

    返回:
        {"discrepancy", "bound", "exact", "plain_values", "transformed_values"}
        后两项为叶子上的 M_k^f 与 M_k^i（按 x 的顺序）
    """
    batch = enumerate_walks(cfg, k, cap=cap)
    pre_positions = batch.positions[:, :-1]
    gradients = gradient_field(f, pre_positions)
    start = float(f.value(cfg.start))
    plain = start + np.sum(gradients * batch.increments, axis=(-1, -2))
    transformed = np.sum(transform_increments(gradients, batch.increments, cfg.i), axis=-1)

    n_tosses = batch.n_tosses
    plain_samples = _refine(plain, n_tosses, depth)
    lhs = _riesz_of_samples(plain_samples, cfg.i, cfg.d)[:, 0]
    rhs = _refine(transformed, n_tosses, depth).values[:, 0]
    discrepancy = float(np.max(np.abs(lhs - rhs)))

    exact = is_sibling_constant(f, cfg, k)
    rounding = TOLERANCES["exact_identity"]
    if exact:
        bound = rounding
    else:
        bound = 4.0 * cfg.delta * (k - 1) * hessian_bound(f, batch.positions.reshape(-1, cfg.d + 1)) + rounding
    logger.debug(f"变换恒等式: d={cfg.d}, i={cfg.i}, k={k}, 偏差={discrepancy:.3e}, 上界={bound:.3e}")
    return {"discrepancy": discrepancy, "bound": bound, "exact": float(exact),
            "plain_values": plain, "transformed_values": transformed}


def continuous_pairing_accumulator(brownian: BrownianPath, f: HarmonicFunction,
                                   g: HarmonicFunction, i: int) -> float:
    """命中之前 ⟨A_i∇f(W_t), ∇g(W_t)⟩ 的左端点黎曼和"""
    times = brownian.times
    end = brownian.hit_time if brownian.hit else times[-1]
    dt = np.diff(np.minimum(times, end))
    used = np.flatnonzero(dt > 0)
    if used.size == 0:
        return 0.0
    points = brownian.positions[used]
    density = pairing_density(gradient_field(f, points), gradient_field(g, points), i)
    return float(np.sum(density * dt[used]))


class FineMartingaleObserver(WalkObserver):
    """
    细步鞅和：每个族成员的 M_T^f、M_T^i，可选测试鞅 M_T^g
    """

    def __init__(self, f: HarmonicFunction, g: Optional[Sequence[HarmonicFunction]] = None):
        self.f = f
        self.g = list(g) if g is not None else None

    def on_start(self, engine: BatchEngine):
        members, paths = engine.active.shape
        self.slices = engine.slices
        start = float(self.f.value(engine.cfg.start))
        self.plain = np.full((members, paths), start)
        self.transformed = np.zeros((members, paths))
        if self.g is not None:
            starts = [float(g.value(engine.cfg.start)) for g in self.g]
            self.test = np.array([np.full(paths, s) for s in starts])

    def on_fine_block(self, member, paths, pre_positions, increments):
        flat = pre_positions.reshape(-1, pre_positions.shape[-1])
        gradients = self.f.gradient(flat).reshape(pre_positions.shape)
        self.plain[member, paths] += np.sum(gradients * increments, axis=(1, 2))
        self.transformed[member, paths] += np.sum(
            transform_increments(gradients, increments, self.slices[member]), axis=1)
        if self.g is not None:
            g_gradients = self.g[member].gradient(flat).reshape(pre_positions.shape)
            self.test[member, paths] += np.sum(g_gradients * increments, axis=(1, 2))


class CoarseMartingaleObserver(WalkObserver):
    """粗积分变体：Σ ∇f(X_{n−1})·dX_n 与 Σ A_i∇f(X_{n−1})·dX_n"""

    def __init__(self, f: HarmonicFunction):
        self.f = f

    def on_start(self, engine: BatchEngine):
        members, paths = engine.active.shape
        width = engine.cfg.d + 1
        self.slices = engine.slices
        self.plain = np.full((members, paths), float(self.f.value(engine.cfg.start)))
        self.transformed = np.zeros((members, paths))
        self._gradient = np.zeros((members, paths, width))
        self._anchor = engine.positions.copy()

    def _settle(self, member, paths, positions):
        step = positions - self._anchor[member, paths]
        gradients = self._gradient[member, paths]
        self.plain[member, paths] += np.sum(gradients * step, axis=-1)
        self.transformed[member, paths] += transform_increments(gradients, step, self.slices[member])

    def on_coarse_step(self, member, paths, n, positions):
        if n > 0:
            self._settle(member, paths, positions)
        self._gradient[member, paths] = self.f.gradient(positions)
        self._anchor[member, paths] = positions

    def on_finish(self, engine: BatchEngine):
        for member in range(len(self.slices)):
            paths = np.arange(engine.n_paths)
            self._settle(member, paths, engine.positions[member])
            self._gradient[member] = 0.0
            self._anchor[member] = engine.positions[member]


class CoarsePairingObserver(WalkObserver):
    """
    离散配对的黎曼和 Σ_{n<n_ε} ⟨A_i∇f(X_n), ∇g(X_n)⟩·θ
    g 可按族成员分别给出（向量实验）
    """

    def __init__(self, f: HarmonicFunction, g: Sequence[HarmonicFunction]):
        self.f = f
        self.g = list(g)

    def on_start(self, engine: BatchEngine):
        self.slices = engine.slices
        self.theta = engine.cfg.theta
        self.pairing = np.zeros(engine.active.shape)

    def on_coarse_step(self, member, paths, n, positions):
        g = self.g[member] if len(self.g) > 1 else self.g[0]
        density = pairing_density(self.f.gradient(positions), g.gradient(positions), self.slices[member])
        self.pairing[member, paths] += density * self.theta


class BrownianPairingObserver(BrownianObserver):
    """连续配对 ∫₀^{T∧τ} Σ_i ⟨A_i∇f(W), ∇g_i(W)⟩ dt 的黎曼和"""

    def __init__(self, f: HarmonicFunction, g: Sequence[HarmonicFunction], slices: Sequence[int]):
        if len(g) != len(slices):
            raise RieszLabError("测试函数个数与变换编号个数不一致")
        self.f = f
        self.g = list(g)
        self.slices = list(slices)

    def on_start(self, engine: BrownianBatch):
        self.pairing = np.zeros((len(self.slices), engine.n_paths))

    def on_sample(self, paths, step, positions, dt):
        grad_f = self.f.gradient(positions)
        for member, (g, i) in enumerate(zip(self.g, self.slices)):
            self.pairing[member, paths] += pairing_density(grad_f, g.gradient(positions), i) * dt


class BrownianMartingaleObserver(BrownianObserver):
    """
    连续鞅的伊藤和：梯度在采样点取值并保持到下一个采样点，
    增量逐子步累加，直到命中
    """

    def __init__(self, f: HarmonicFunction, i: int):
        self.f = f
        self.i = i

    def on_start(self, engine: BrownianBatch):
        self.plain = np.full(engine.n_paths, float(self.f.value(engine.start)))
        self.transformed = np.zeros(engine.n_paths)
        self._held = np.zeros((engine.n_paths, engine.start.size))

    def on_sample(self, paths, step, positions, dt):
        self._held[paths] = self.f.gradient(positions)

    def on_step(self, paths, step, before, after):
        gradients = self._held[paths]
        increments = after - before
        self.plain[paths] += np.sum(gradients * increments, axis=-1)
        self.transformed[paths] += transform_increments(gradients, increments, self.i)


