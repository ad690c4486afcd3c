"""
核心模块包
包含进程级配置、异常定义与日志设置
"""
from .config import (
    BASE_DIR,
    DEFAULT_OUTPUT_DIR,
    LOG_DIR,
    LOG_FILE,
    DEFAULT_SEED,
    MAX_DYADIC_DEPTH,
    TOLERANCES,
    STATISTICS,
    settings,
)
from .exceptions import (
    RieszLabError,
    DyadicDomainError,
    EnumerationCapError,
    LengthMismatchError,
    EvaluationDomainError,
    NonDecayingInputError,
    ConfigError,
)
from .log_config import setup_logging

__all__ = [
    'BASE_DIR',
    'DEFAULT_OUTPUT_DIR',
    'LOG_DIR',
    'LOG_FILE',
    'DEFAULT_SEED',
    'MAX_DYADIC_DEPTH',
    'TOLERANCES',
    'STATISTICS',
    'settings',
    'RieszLabError',
    'DyadicDomainError',
    'EnumerationCapError',
    'LengthMismatchError',
    'EvaluationDomainError',
    'NonDecayingInputError',
    'ConfigError',
    'setup_logging',
]
