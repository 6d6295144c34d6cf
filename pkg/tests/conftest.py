import os
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


def pytest_configure(config):
    config.addinivalue_line("markers", "long_run: hours-scale reproduction, enabled by USPERM_LONG_RUN=1")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("USPERM_LONG_RUN") == "1":
        return
    skip = pytest.mark.skip(reason="set USPERM_LONG_RUN=1 to run")
    for item in items:
        if "long_run" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def trace_rows():
    rows = []
    for line in (DATA / "trace_n6.txt").read_text().splitlines():
        if line and not line.startswith("#"):
            rows.append([int(x) for x in line.split()])
    return rows


@pytest.fixture(scope="session")
def reference_ratios():
    out = {}
    for line in (DATA / "coeff_ratios.txt").read_text().splitlines():
        if line and not line.startswith("#"):
            d, i, r = line.split()
            out[int(d), int(i)] = r
    return out
