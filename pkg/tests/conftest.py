import math

import numpy as np
import pytest

from lmg_gmc import criticality as crit
from lmg_gmc.oracle import embed_dicke
from lmg_gmc.symmetric import DickeVector


def symmetric_basis(n):
    """Columns are the Dicke states |n, j> embedded in the 2^n computational basis."""
    return np.column_stack([embed_dicke(DickeVector.dicke(n, j)) for j in range(n + 1)])


def random_dicke(n, seed):
    rng = np.random.default_rng(seed)
    return DickeVector.normalized(rng.normal(size=n + 1))


_FSS_MEMO = {}


@pytest.fixture(scope="session")
def fss_results():
    """Memoised pipeline runs keyed by k spec, all sizes up to 498, dropping N < 24."""

    def get(k_spec):
        if k_spec not in _FSS_MEMO:
            _FSS_MEMO[k_spec] = crit.run_fss(k_spec, 498, drop_below=24)
        return _FSS_MEMO[k_spec]

    return get


@pytest.fixture
def log2():
    return math.log(2.0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
