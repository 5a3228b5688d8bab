import numpy as np
import pytest

from bsbnet import kernels


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run the test once per kernel backend."""
    monkeypatch.setattr(kernels, "impl", kernels.get_backend(request.param))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)



_ACCEPTANCE = []


@pytest.fixture
def note(request):
    """Attach a measured figure to an acceptance test's summary line."""
    request.node.acceptance_notes = []
    return request.node.acceptance_notes.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and rep.when == "call":
        notes = "; ".join(getattr(item, "acceptance_notes", []))
        _ACCEPTANCE.append((marker.args[0], item.name, rep.outcome, notes))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, name, outcome, notes in sorted(_ACCEPTANCE, key=lambda r: str(r[0])):
        status = "PASS" if outcome == "passed" else "FAIL"
        line = f"{status}  criterion {crit}: {name}"
        terminalreporter.write_line(line + (f"  [{notes}]" if notes else ""))
