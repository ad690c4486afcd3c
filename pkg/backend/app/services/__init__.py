"""
数值服务模块

模块结构：
├── dyadic/          # 二进区间、哈尔分解、二进希尔伯特/黎兹变换
├── stochastics/     # 抛币驱动的随机游走、布朗运动参考、精确枚举
├── harmonic/        # 调和延拓、网格黎兹变换、半空间配对积分
├── martingale/      # 离散鞅、鞅变换与结构恒等式
└── experiments/     # 各项验证实验
"""
