import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from banachvi._kernels import _fallback  # noqa: E402

try:
    from banachvi._kernels import _core
except ImportError:  # extension not built
    _core = None

BACKENDS = [("python", _fallback)] + ([("cython", _core)] if _core is not None else [])


@pytest.fixture(params=[b[1] for b in BACKENDS], ids=[b[0] for b in BACKENDS])
def kernels(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
