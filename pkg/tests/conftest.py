import math

import pytest
from hypothesis import settings

from landau_gouy.constants import KEV
from landau_gouy.params import derive_setup, free_space_setup, setup_from_lab_units

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def lab():
    """1.9 T, 200 keV with an arbitrary 1 nm waist."""
    return derive_setup(1.9, 200 * KEV, 1e-9)


@pytest.fixture(scope="session")
def desk():
    """The z_R = 1000 um regime used for the wave simulations."""
    return setup_from_lab_units(1.9, 200.0, zr_um=1000.0)


@pytest.fixture(scope="session")
def free():
    return free_space_setup(200 * KEV, 20e-9)


@pytest.fixture(scope="session")
def quarter(desk):
    return math.pi * desk.z_m / 4


_RESULTS: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion id")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[rep.outcome]
        if rep.when == "setup" and rep.outcome == "failed":
            status = "ERROR"
        _RESULTS[number] = (status, title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        status, title, detail = _RESULTS[number]
        line = f"criterion {number:2d} {status:5s} {title}"
        if detail:
            line += f" | {detail}"
        terminalreporter.write_line(line)
