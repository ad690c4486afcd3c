# -*- coding: utf-8 -*-
"""
配置模块
包含实验运行参数与全局配置管理
"""

from .run_config import EXPERIMENT_NAMES, RunConfig, run_config, get_config, update_config, reset_config

__all__ = [
    'EXPERIMENT_NAMES',
    'RunConfig',
    'run_config',
    'get_config',
    'update_config',
    'reset_config'
]
