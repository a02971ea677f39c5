import sys
import importlib.util

import pytest

from ultratangent import _backend

BACKENDS = ["numpy"]
if importlib.util.find_spec("ultratangent._kernels") is not None:
    BACKENDS.append("cython")


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Run a test once per available kernel implementation."""
    before = _backend.NAME
    _backend.use(request.param)
    yield request.param
    _backend.use(before)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
