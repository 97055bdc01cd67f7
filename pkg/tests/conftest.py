import math
import warnings

import hypothesis
import numpy as np
import pytest

from smallscatter.material import MaterialSpec, design

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.load_profile("ci")

K_PAPER = 2 * math.pi * 1000 / 34400  # 0.18265073...
N_TARGET = -1 + 0.001j

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def paper_spec():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return design(N_TARGET, MaterialSpec(k=K_PAPER))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda s: int(s.split(".")[0])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
