# -*- coding: utf-8 -*-
"""
命令行入口
解析参数与配置文件，分派实验，写出报告并把断言结果转换为退出码
"""
import argparse
import configparser
import logging
import re
import time
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from .config.run_config import EXPERIMENT_NAMES, RunConfig
from .core.config import settings
from .core.exceptions import ConfigError, RieszLabError
from .core.log_config import setup_logging
from .models.experiment_models import ExperimentReport
from .services.experiments import run_experiment
from .utils.report_writer import write_report

logger = logging.getLogger(__name__)

CONFIG_SECTION = "run"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3

LIST_FIELDS = ("N", "p", "y_sweep")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="run_experiment",
        description="二进黎兹变换的随机游走模拟与验证",
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--config", dest="config_file", help="INI 配置文件（[run] 段）")
    parser.add_argument("--experiment", choices=EXPERIMENT_NAMES)

    parser.add_argument("--d", type=int)
    parser.add_argument("--i", type=int)
    parser.add_argument("--N", type=int, nargs="+")
    parser.add_argument("--T", type=float)
    parser.add_argument("--y", type=float)
    parser.add_argument("--y-sweep", dest="y_sweep", type=float, nargs="+")

    parser.add_argument("--p", type=float, nargs="+")
    parser.add_argument("--paths", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--threads", type=int)

    parser.add_argument("--depth", type=int)
    parser.add_argument("--layers", type=int)
    parser.add_argument("--L", type=float)
    parser.add_argument("--M", type=int)

    parser.add_argument("--mode", choices=("enumeration", "montecarlo"))
    parser.add_argument("--walk-mode", dest="walk_mode", choices=("coupled", "decoupled"))
    parser.add_argument("--delta", type=float)
    parser.add_argument("--theta", type=float)
    parser.add_argument("--eps", type=float)
    parser.add_argument("--bridge", action=argparse.BooleanOptionalAction)
    parser.add_argument("--coarse-integral", dest="coarse_integral", action=argparse.BooleanOptionalAction)
    parser.add_argument("--product-form", dest="product_form", action=argparse.BooleanOptionalAction)
    parser.add_argument("--vector", action=argparse.BooleanOptionalAction)

    parser.add_argument("--substep", type=float)
    parser.add_argument("--bandwidth", type=float)
    parser.add_argument("--horizon", type=float)
    parser.add_argument("--restarts", type=int)
    parser.add_argument("--iterations", type=int)
    parser.add_argument("--probes", type=int)
    parser.add_argument("--output-dir", dest="output_dir")
    return parser


def read_config_file(path: str) -> Dict[str, Any]:
    """读取 [run] 段；键名可用 - 或 _，列表值以逗号或空白分隔"""
    parser = configparser.ConfigParser()
    parser.optionxform = str  # 保留 N、T、L、M 的大小写
    try:
        found = parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"配置文件格式错误: {path}: {e}") from e
    if not found:
        raise ConfigError(f"配置文件不存在或不可读: {path}")
    if not parser.has_section(CONFIG_SECTION):
        raise ConfigError(f"配置文件缺少 [{CONFIG_SECTION}] 段: {path}")

    values: Dict[str, Any] = {}
    for key, raw in parser.items(CONFIG_SECTION):
        name = key.strip().replace("-", "_")
        text = raw.strip()
        values[name] = [item for item in re.split(r"[,\s]+", text) if item] if name in LIST_FIELDS else text
    return values


def parse_config(args: Optional[Sequence[str]] = None, file: Optional[str] = None) -> RunConfig:
    """
    命令行 > 配置文件 > 环境变量 (RDL_SEED) > 默认值

    错误:
        ConfigError: 配置文件缺失或格式错误
        ValidationError: 未知键、参数越界、跨字段约束不满足
    """
    namespace = vars(build_parser().parse_args([] if args is None else list(args)))
    file = namespace.pop("config_file", file)
    merged: Dict[str, Any] = read_config_file(file) if file else {}
    merged.update(namespace)
    return RunConfig.model_validate(merged)


def _log_failures(report: ExperimentReport) -> List[str]:
    names = []
    for check in report.failed_checks:
        logger.error(f"❌ 断言失败: {check.criterion} (观测值={check.observed}, 阈值={check.threshold}) {check.detail}")
        names.append(check.criterion)
    return names


def dispatch(cfg: RunConfig) -> int:
    """运行实验并落盘；退出码只取决于报告内容"""
    logger.info(f"🚀 开始实验: {cfg.experiment}, 种子={cfg.seed}, 线程={cfg.threads}")
    started = time.perf_counter()
    try:
        report = run_experiment(cfg)
        path = write_report(report, cfg.output_dir, wall_clock_seconds=time.perf_counter() - started)
    except (RieszLabError, ValidationError) as e:
        logger.error(f"❌ 实验 {cfg.experiment} 失败: {e}")
        return EXIT_CONFIG_ERROR
    except OSError as e:
        logger.error(f"❌ 报告写出失败: {e}", exc_info=True)
        return EXIT_IO_ERROR

    failed = _log_failures(report)
    if failed:
        logger.error(f"❌ {len(failed)}/{len(report.checks)} 条断言失败，报告: {path}")
        return EXIT_CHECK_FAILED
    logger.info(f"✅ 全部 {len(report.checks)} 条断言通过，报告: {path}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    setup_logging(settings.LOG_LEVEL, settings.LOG_FILE or None)
    try:
        cfg = parse_config(argv)
    except (RieszLabError, ValidationError) as e:
        logger.error(f"❌ 配置无效: {e}")
        return EXIT_CONFIG_ERROR
    return dispatch(cfg)
