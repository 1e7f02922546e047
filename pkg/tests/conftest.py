import numpy as np
import pytest

from ifccr import _kernels_py
from ifccr.model import set_log_base

try:
    from ifccr import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

KERNELS = [_kernels_py] + ([_kernels_c] if _kernels_c is not None else [])

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(params=KERNELS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def kernels(request):
    return request.param


@pytest.fixture(autouse=True)
def _bits():
    set_log_base(2)
    yield
    set_log_base(2)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
