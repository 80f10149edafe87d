import pytest

from wesma import _backend

ACCEPTANCE_LINES = []

BACKENDS = _backend.available_backends()


@pytest.fixture(params=BACKENDS)
def backend(request):
    """Run a test once per available kernel backend."""
    before = _backend.current_backend()
    _backend.use_backend(request.param)
    yield request.param
    _backend.use_backend(before)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
