"""
实验报告落盘：<输出目录>/<实验名>-<时间戳>/report.json 与 sweep.csv
"""
import logging
import os
from datetime import datetime
from typing import Optional

import pandas as pd

from ..models.experiment_models import ExperimentReport, RunTiming

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["param", "value", "estimate", "stderr", "exact"]


def report_frame(report: ExperimentReport) -> pd.DataFrame:
    """逐估计量一行；param 列写成 "估计量[扫描参数]"，精确值的 stderr 记 0"""
    rows = [{
        "param": f"{row.name}[{row.param}]",
        "value": row.value,
        "estimate": row.estimate,
        "stderr": 0.0 if row.stderr is None else row.stderr,
        "exact": int(row.exact),
    } for row in report.estimates]
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def run_directory(output_dir: str, experiment: str, now: Optional[datetime] = None) -> str:
    now = now or datetime.now()
    base = os.path.join(output_dir, f"{experiment}-{now.strftime('%Y%m%d-%H%M%S')}")
    path, suffix = base, 1
    while os.path.exists(path):
        path = f"{base}-{suffix}"
        suffix += 1
    return path


def write_report(report: ExperimentReport, output_dir: str, wall_clock_seconds: float = 0.0) -> str:
    """
    写出 report.json 与 sweep.csv

    返回:
        本次运行的目录
    """
    now = datetime.now()
    report.timestamp = RunTiming(created_at=now.isoformat(timespec="seconds"),
                                 wall_clock_seconds=round(wall_clock_seconds, 3))
    path = run_directory(output_dir, report.experiment, now)
    os.makedirs(path, exist_ok=True)

    with open(os.path.join(path, "report.json"), "w", encoding="utf-8") as fh:
        fh.write(report.model_dump_json(indent=2))
    report_frame(report).to_csv(os.path.join(path, "sweep.csv"), index=False, float_format="%.17g")

    logger.info(f"报告已写出: {path}")
    return path


def load_report(path: str) -> ExperimentReport:
    with open(os.path.join(path, "report.json"), "r", encoding="utf-8") as fh:
        return ExperimentReport.model_validate_json(fh.read())
