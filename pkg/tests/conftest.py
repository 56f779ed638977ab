import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"

# (month, LECM, PE of Sensex) around the May 2006 and January 2008 crashes
TABLE_MAY_2006 = [
    ("2006-01", 7.75, 18.6),
    ("2006-02", 5.46, 18.64),
    ("2006-03", 6.4, 20.04),
    ("2006-04", 8.68, 21.35),
    ("2006-05", 11.05, 20.41),
    ("2006-06", 11.2, 17.9),
]
TABLE_JAN_2008 = [
    ("2007-10", 9.04, 24.86),
    ("2007-11", 8.83, 25.44),
    ("2007-12", 8.17, 26.94),
    ("2008-01", 11.32, 25.53),
    ("2008-02", 9.82, 22.23),
    ("2008-03", 10.76, 20.18),
    ("2008-04", 6.98, 20.71),
    ("2008-05", 7.11, 20.66),
    ("2008-06", 9.25, 18.22),
]


@pytest.fixture
def write_csv(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write


ACCEPTANCE_RESULTS = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, name): exit criterion of the build")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and (rep.when == "call" or (rep.when == "setup" and not rep.passed)):
        detail = dict(item.user_properties).get("detail", "")
        ACCEPTANCE_RESULTS.append((marker.args[0], marker.args[1], rep.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {name}: {detail}")
