"""
实验报告相关的数据模型定义
"""
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator


class ReportStatus:
    """报告状态枚举"""
    PASSED = "PASSED"
    FAILED = "FAILED"


class EstimateRow(BaseModel):
    """单个估计量：统计估计带标准误，精确值带 exact 标记"""
    param: str = Field(..., description="扫描参数名，如 N、p、y")
    value: float = Field(..., description="扫描参数取值")
    name: str = Field(..., description="估计量名称")
    estimate: float = Field(..., description="估计值")
    stderr: Optional[float] = Field(None, description="标准误，精确值为 None")
    exact: bool = Field(False, description="是否为精确（枚举或确定性）结果")
    paths: Optional[int] = Field(None, description="使用的路径数")

    @model_validator(mode="after")
    def _stderr_or_exact(self) -> "EstimateRow":
        if not self.exact and self.stderr is None:
            raise ValueError(f"统计估计 {self.name} 缺少标准误")
        return self


class CheckResult(BaseModel):
    """一条已声明的断言"""
    criterion: str = Field(..., description="判据名称")
    passed: bool = Field(..., description="是否通过")
    observed: Optional[float] = Field(None, description="观测值")
    threshold: Optional[float] = Field(None, description="阈值")
    detail: str = Field("", description="说明")


class ConvergenceSweep(BaseModel):
    """收敛扫描：N 严格递增，对数-对数加权最小二乘斜率"""
    label: str = Field(..., description="扫描对象")
    N: List[int] = Field(..., description="分辨率序列")
    estimates: List[float] = Field(..., description="各 N 上的估计")
    stderrs: List[float] = Field(..., description="各 N 上的标准误")
    slope: Optional[float] = Field(None, description="拟合的衰减斜率（仅报告，不作断言）")
    slope_stderr: Optional[float] = Field(None, description="斜率标准误")


class RunTiming(BaseModel):
    """运行时刻与耗时，复现比较时整体排除"""
    created_at: str = Field(..., description="生成时间 (ISO 8601)")
    wall_clock_seconds: float = Field(..., description="耗时（秒）")


class ExperimentReport(BaseModel):
    """实验报告：除 timestamp 外，同一 (种子, 参数) 下逐字节可复现"""
    experiment: str = Field(..., description="实验名称")
    parameters: Dict[str, Any] = Field(..., description="完整的生效配置")
    estimates: List[EstimateRow] = Field(default_factory=list, description="估计量")
    derived: Dict[str, float] = Field(default_factory=dict, description="派生量：差距、比值、范数界")
    sweeps: List[ConvergenceSweep] = Field(default_factory=list, description="收敛扫描")
    checks: List[CheckResult] = Field(default_factory=list, description="断言结果")
    total_paths: int = Field(0, description="总路径数")
    status: str = Field(ReportStatus.PASSED, description="PASSED / FAILED")
    timestamp: Optional[RunTiming] = Field(None, description="生成时间与耗时，复现比较时排除")

    def add_estimate(self, param: str, value: float, name: str, estimate: float,
                     stderr: Optional[float] = None, exact: bool = False,
                     paths: Optional[int] = None) -> EstimateRow:
        row = EstimateRow(param=param, value=float(value), name=name, estimate=float(estimate),
                          stderr=None if stderr is None else float(stderr), exact=exact, paths=paths)
        self.estimates.append(row)
        return row

    def add_check(self, criterion: str, passed: bool, observed: Optional[float] = None,
                  threshold: Optional[float] = None, detail: str = "") -> CheckResult:
        check = CheckResult(criterion=criterion, passed=bool(passed),
                            observed=None if observed is None else float(observed),
                            threshold=None if threshold is None else float(threshold), detail=detail)
        self.checks.append(check)
        self.status = ReportStatus.PASSED if all(c.passed for c in self.checks) else ReportStatus.FAILED
        return check

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed_checks(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]
