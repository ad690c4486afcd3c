"""
工具包主体：二进树、随机游走、调和预言机、鞅引擎与验证实验
"""
