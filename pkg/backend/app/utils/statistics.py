"""
蒙特卡罗估计量：均值、标准误、L^p 范数（delta 方法）与差值
"""
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Estimate:
    """估计值及其标准误"""
    value: float
    stderr: float
    n: int

    def __sub__(self, other: "Estimate") -> "Estimate":
        return Estimate(self.value - other.value, math.hypot(self.stderr, other.stderr), min(self.n, other.n))

    def __add__(self, other: "Estimate") -> "Estimate":
        return Estimate(self.value + other.value, math.hypot(self.stderr, other.stderr), min(self.n, other.n))

    def scale(self, factor: float) -> "Estimate":
        return Estimate(factor * self.value, abs(factor) * self.stderr, self.n)

    @property
    def magnitude(self) -> "Estimate":
        return Estimate(abs(self.value), self.stderr, self.n)

    def z_score(self, target: float = 0.0) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.value == target else math.inf
        return (self.value - target) / self.stderr


def mean_estimate(samples) -> Estimate:
    samples = np.asarray(samples, dtype=float).reshape(-1)
    n = samples.size
    if n == 0:
        return Estimate(float("nan"), float("nan"), 0)
    stderr = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return Estimate(float(np.mean(samples)), stderr, n)


def lp_norm_estimate(samples, p: float) -> Estimate:
    """(E|X|^p)^{1/p}，标准误用 delta 方法"""
    moment = mean_estimate(np.abs(np.asarray(samples, dtype=float)) ** p)
    if moment.value <= 0.0:
        return Estimate(0.0, 0.0, moment.n)
    value = moment.value ** (1.0 / p)
    stderr = value / (p * moment.value) * moment.stderr
    return Estimate(value, stderr, moment.n)


def gap_estimate(first, second) -> Estimate:
    """两组独立样本均值之差"""
    return mean_estimate(first) - mean_estimate(second)
