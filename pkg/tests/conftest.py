import pytest

from academic_pipeline import _pykernels
from academic_pipeline.core import ModelParams
from academic_pipeline.data import sample_series

try:
    from academic_pipeline import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_ACCEPTANCE_LINES = []


@pytest.fixture
def baseline():
    return ModelParams()


@pytest.fixture(scope="session")
def sample():
    return sample_series()


@pytest.fixture(params=["python", "cython"])
def kernel_impl(request):
    if request.param == "cython":
        if _ckernels is None:
            pytest.skip("compiled kernels not built")
        return _ckernels
    return _pykernels


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
