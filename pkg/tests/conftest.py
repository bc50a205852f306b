# tests/conftest.py
from __future__ import annotations

import numpy as np
import pytest

from cosparse_abs import config as abs_config
from cosparse_abs.model import RngSeed, generate_tight_frame, instance_from_counts


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run desk-scale benchmarks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(autouse=True)
def _default_constants():
    # tests that push config values must not leak them
    abs_config.apply_config(abs_config.DEFAULT_CFG)
    yield
    abs_config.apply_config(abs_config.DEFAULT_CFG)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_op():
    return generate_tight_frame(24, 20, RngSeed(7).child(0))


@pytest.fixture
def small_instance(small_op):
    # x spans a 2-dimensional subspace; 6 nonzeros in Omega x
    return instance_from_counts(small_op, 18, 18, RngSeed(7).child(1))


@pytest.fixture
def default_cfg(tmp_path):
    return abs_config.load_config(str(tmp_path / "missing.json"))
