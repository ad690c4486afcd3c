"""
测试模块

单元测试与小规模端到端实验测试
"""
