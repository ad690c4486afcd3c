#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
二进黎兹变换验证实验启动脚本

使用方法：
python run_experiment.py --experiment moments --d 2 --i 1 --N 3 --mode enumeration
python run_experiment.py --config run.ini --threads 4
"""
import os
import sys

# 将项目根目录添加到Python路径
sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

from backend.app.cli import main

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
