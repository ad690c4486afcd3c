"""
数据模型包
包含实验报告相关的数据模型定义
"""
from .experiment_models import (
    ExperimentReport,
    EstimateRow,
    CheckResult,
    ConvergenceSweep,
    ReportStatus,
    RunTiming
)

__all__ = [
    'ExperimentReport',
    'EstimateRow',
    'CheckResult',
    'ConvergenceSweep',
    'ReportStatus',
    'RunTiming'
]
