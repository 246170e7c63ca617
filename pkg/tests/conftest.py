import math

import pytest

from leo_ntn.scenario import ScenarioConfig

DEG45 = math.radians(45.0)
ZENITH = math.pi / 2


@pytest.fixture
def cfg():
    return ScenarioConfig()


_criteria: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): end-to-end acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            item.user_properties.append(("acceptance", mark.args))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "acceptance" not in props:
        return
    if report.when == "call" or report.failed:
        number, title = props["acceptance"]
        # parametrised criteria pass only if every case passes
        ok = report.passed and _criteria.get(number, (title, True))[1]
        _criteria[number] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
