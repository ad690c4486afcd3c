# -*- coding: utf-8 -*-
"""
实验运行配置
所有数值参数的默认值、取值范围与跨字段约束
"""
import logging
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.config import settings

logger = logging.getLogger(__name__)

EXPERIMENT_NAMES = (
    "moments",
    "weak_convergence",
    "martingale_approx",
    "weak_formulation",
    "gv_identity",
    "norm_comparison",
    "vector",
    "pointwise_riesz",
    "cauchy_riemann",
    "transform_identity",
    "operator_algebra",
    "harmonic_measure",
)


class RunConfig(BaseModel):
    """实验运行配置类"""

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    experiment: str = Field("moments", description="实验名称")

    # 几何与时间参数
    d: int = Field(2, ge=1, le=3, description="边界维数")
    i: int = Field(1, ge=1, le=3, description="黎兹变换方向")
    N: List[int] = Field(default_factory=lambda: [4, 8, 16], description="分辨率序列（严格递增）")
    T: float = Field(4.0, gt=0, description="终止时刻")
    y: float = Field(1.0, gt=0, description="起始高度")
    y_sweep: List[float] = Field(default_factory=lambda: [1.0, 2.0, 4.0], description="逐点实验的高度序列")

    # 统计参数
    p: List[float] = Field(default_factory=lambda: [2.0], description="L^p 指数")
    paths: int = Field(100000, ge=1, description="每个扫描点的路径数")
    seed: int = Field(default_factory=lambda: settings.SEED, ge=0, description="主随机种子")
    threads: int = Field(default_factory=lambda: settings.THREADS, ge=1, description="线程数上限")

    # 二进树与网格
    depth: int = Field(8, ge=1, le=20, description="系数树深度 K")
    layers: int = Field(2, ge=1, le=20, description="枚举的层数 / 细步数 k")
    L: float = Field(20.0, gt=0, description="周期盒半宽")
    M: int = Field(256, ge=8, le=4096, description="每轴网格点数（2 的幂）")

    # 模式开关
    mode: Literal["enumeration", "montecarlo"] = Field("enumeration", description="精确枚举或蒙特卡洛")
    walk_mode: Literal["coupled", "decoupled"] = Field("coupled", description="δ、θ、ε 是否由 N 决定")
    delta: Optional[float] = Field(None, gt=0, description="解耦模式的细步长 δ")
    theta: Optional[float] = Field(None, gt=0, description="解耦模式的粗步长 θ")
    eps: Optional[float] = Field(None, gt=0, description="解耦模式的停止带宽 ε")
    bridge: bool = Field(True, description="布朗桥穿越修正")
    coarse_integral: bool = Field(False, description="鞅和用粗步积分代替细步和")
    product_form: bool = Field(False, description="弱形式实验同时报告 E[M^i M^g]")
    vector: bool = Field(False, description="范数比较使用向量形式")

    # 数值细节
    substep: Optional[float] = Field(None, gt=0, description="布朗子步长，默认 θ(N_min)/64")
    bandwidth: float = Field(0.25, gt=0, description="核回归带宽")
    horizon: float = Field(10000.0, gt=0, description="布朗命中实验的时间上限（自适应步长）")
    restarts: int = Field(8, ge=1, description="范数搜索的随机重启次数")
    iterations: int = Field(50, ge=1, description="范数搜索的迭代次数")
    probes: int = Field(9, ge=1, description="逐点实验的探测点数")

    output_dir: str = Field(default_factory=lambda: settings.OUTPUT_DIR, description="输出目录")

    @field_validator("experiment")
    @classmethod
    def _known_experiment(cls, value: str) -> str:
        if value not in EXPERIMENT_NAMES:
            raise ValueError(f"未知实验: {value}，可选 {', '.join(EXPERIMENT_NAMES)}")
        return value

    @field_validator("N")
    @classmethod
    def _strictly_increasing(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("N 序列不能为空")
        if any(n < 1 for n in value):
            raise ValueError(f"N 必须为正: {value}")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError(f"N 序列必须严格递增: {value}")
        return value

    @field_validator("p")
    @classmethod
    def _exponents(cls, value: List[float]) -> List[float]:
        if not value or any(q < 1 for q in value):
            raise ValueError(f"要求每个 p ≥ 1: {value}")
        return value

    @field_validator("M")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError(f"M 必须是 2 的幂，当前 {value}")
        return value

    @model_validator(mode="after")
    def _cross_fields(self) -> "RunConfig":
        if self.i > self.d:
            raise ValueError(f"要求 i ≤ d，当前 i={self.i}, d={self.d}")
        if self.walk_mode == "decoupled":
            if None in (self.delta, self.theta, self.eps):
                raise ValueError("解耦模式需要同时给出 delta、theta、eps")
            ratio = self.theta / self.delta
            if round(ratio) < 1 or abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
                raise ValueError(f"theta/delta = {ratio} 不是正整数")
        if self.experiment == "norm_comparison" and any(q <= 1 for q in self.p):
            raise ValueError(f"范数比较要求每个 p > 1: {self.p}")
        return self

    def effective(self) -> dict:
        """回显到报告中的生效配置"""
        return self.model_dump(mode="json", exclude={"output_dir", "threads"})


# 全局配置实例
run_config = RunConfig()


def update_config(**kwargs) -> RunConfig:
    """更新配置参数（整体重新校验）"""
    global run_config
    unknown = [key for key in kwargs if key not in RunConfig.model_fields]
    for key in unknown:
        logger.warning(f"❌ 未知配置项: {key}")
    run_config = RunConfig.model_validate({**run_config.model_dump(), **kwargs})
    for key, value in kwargs.items():
        logger.info(f"✅ 更新配置: {key} = {value}")
    return run_config


def get_config() -> RunConfig:
    """获取当前配置"""
    return run_config


def reset_config() -> RunConfig:
    """重置为默认配置"""
    global run_config
    run_config = RunConfig()
    logger.info("✅ 配置已重置为默认值")
    return run_config
