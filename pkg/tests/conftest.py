import numpy as np
import pytest

from nosignal.matcore import ket, projector


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def parity_elements():
    """E0 onto span{|01>,|10>}, E1 onto span{|00>,|11>}, built from kets."""
    e0 = projector(ket(0, 1)) + projector(ket(1, 0))
    e1 = projector(ket(0, 0)) + projector(ket(1, 1))
    return [e0, e1]


def random_hermitian(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


def svd_trace_norm(m):
    """Independent trace norm: sum of singular values."""
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    previous = _CRITERIA.get(number, (title, True))[1]
    _CRITERIA[number] = (title, previous and report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}")
