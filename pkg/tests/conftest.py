from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

_acceptance = {}


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        _acceptance[item.nodeid] = (marker.args[0], report.passed)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion checked by a test")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed in _acceptance.values():
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}")
