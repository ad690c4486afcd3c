"""
L^p 算子范数的下界估计
非线性幂迭代（q 对偶重加权）加随机重启
"""
import logging
from typing import Callable, List, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

# apply: (n,) -> (n, C)；adjoint: (n, C) -> (n,)
LinearMap = Callable[[np.ndarray], np.ndarray]


def lp_norm_points(values: np.ndarray, p: float) -> float:
    """逐点 ℓ² 范数的 L^p 平均：(mean |v|^p)^{1/p}"""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        magnitudes = np.abs(values)
    else:
        magnitudes = np.sqrt(np.sum(values * values, axis=1))
    if np.isinf(p):
        return float(np.max(magnitudes)) if magnitudes.size else 0.0
    return float(np.mean(magnitudes ** p) ** (1.0 / p))


def _duality_map(values: np.ndarray, p: float) -> np.ndarray:
    """J_p(v) = |v|^{p−2} v（逐点 ℓ² 意义）"""
    if values.ndim == 1:
        magnitudes = np.abs(values)
    else:
        magnitudes = np.sqrt(np.sum(values * values, axis=1))[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        weights = np.where(magnitudes > 0, magnitudes ** (p - 2.0), 0.0)
    return weights * values


def _ratio(apply: LinearMap, x: np.ndarray, p: float) -> float:
    denominator = lp_norm_points(x, p)
    if denominator == 0.0:
        return 0.0
    return lp_norm_points(apply(x), p) / denominator


def power_iteration(apply: LinearMap,
                    adjoint: LinearMap,
                    n: int,
                    p: float,
                    starts: Sequence[np.ndarray] = (),
                    restarts: int = 8,
                    iterations: int = 50,
                    seed: int = 0) -> dict:
    """
    最大化 ‖Ax‖_p / ‖x‖_p

    参数:
        apply: 线性算子
        adjoint: 其转置
        n: 输入维数
        p: 指数 p > 1
        starts: 额外的确定性初值
        restarts: 随机初值个数
        iterations: 每条轨迹的迭代次数
        seed: 随机初值的种子

    返回:
        {"ratio": 最佳比值, "argmax": 对应输入, "trajectories": 轨迹数}
        比值是对实际向量求值得到的，因此是可验证的下界
    """
    if p <= 1.0:
        raise ValueError(f"要求 p > 1，当前 p={p}")
    q = p / (p - 1.0)

    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0x5EED], dtype=np.uint64)))
    initial: List[np.ndarray] = [np.asarray(s, dtype=float).reshape(n) for s in starts]
    initial.extend(rng.standard_normal(n) for _ in range(restarts))

    best_ratio = 0.0
    best_x: Optional[np.ndarray] = None

    for x in initial:
        if not np.any(x):
            continue
        x = x / lp_norm_points(x, p)
        for _ in range(iterations):
            ratio = _ratio(apply, x, p)
            if ratio > best_ratio:
                best_ratio, best_x = ratio, x.copy()
            y = apply(x)
            z = adjoint(_duality_map(y, p))
            if not np.any(z):
                break
            x_next = _duality_map(z, q)
            x_next = x_next / lp_norm_points(x_next, p)
            if np.allclose(x_next, x, rtol=0.0, atol=1e-15):
                break
            x = x_next
        ratio = _ratio(apply, x, p)
        if ratio > best_ratio:
            best_ratio, best_x = ratio, x.copy()

    logger.debug(f"幂迭代完成: p={p}, n={n}, 轨迹数={len(initial)}, 最佳比值={best_ratio:.12f}")
    return {"ratio": best_ratio, "argmax": best_x, "trajectories": len(initial)}
