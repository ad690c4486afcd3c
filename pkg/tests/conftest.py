"""
公共测试夹具
"""
import numpy as np
import pytest

from backend.app.config.run_config import RunConfig


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([2024, 7], dtype=np.uint64)))


@pytest.fixture
def output_dir(tmp_path) -> str:
    return str(tmp_path / "runs")


@pytest.fixture
def small_config(output_dir):
    """小规模配置：路径少、网格粗、树浅"""

    def build(**overrides) -> RunConfig:
        values = dict(
            d=1, i=1, N=[2, 3], T=1.0, y=1.0, paths=2000, seed=11, threads=1,
            depth=4, layers=2, L=10.0, M=64, restarts=2, iterations=10,
            output_dir=output_dir,
        )
        values.update(overrides)
        return RunConfig(**values)

    return build
