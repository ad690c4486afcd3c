"""
数值分析模块
包含非线性幂迭代范数估计与收敛扫描判据
"""
from .operator_norms import lp_norm_points, power_iteration
from .convergence import loglog_slope, build_sweep, consistent_with, decrease_z_scores, monotone_decrease

__all__ = ['lp_norm_points', 'power_iteration', 'loglog_slope', 'build_sweep',
           'consistent_with', 'decrease_z_scores', 'monotone_decrease']
