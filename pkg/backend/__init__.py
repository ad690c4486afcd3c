"""
二进黎兹变换模拟与验证工具包
"""
