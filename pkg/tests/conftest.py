import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from sparseising import _backend  # noqa: E402

# the compiled backend is exercised only when the extension is built
BACKENDS = ["python"] + (["cython"] if _backend.BACKEND == "cython" else [])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
