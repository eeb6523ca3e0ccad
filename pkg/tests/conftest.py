import pytest

from involute.field_equations import Metric, einstein_maxwell_symbol, maxwell_symbol, ricci_symbol
from involute.spencer_analysis import cohomology_table
from involute.symbol_systems import build_system

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def minkowski():
    return Metric.minkowski(4)


@pytest.fixture(scope="session")
def einstein(minkowski):
    return build_system(ricci_symbol(minkowski), 7)


@pytest.fixture(scope="session")
def einstein_table(einstein):
    return cohomology_table(einstein)


@pytest.fixture(scope="session")
def maxwell(minkowski):
    return build_system(maxwell_symbol(minkowski), 5)


@pytest.fixture(scope="session")
def maxwell_table(maxwell):
    return cohomology_table(maxwell)


@pytest.fixture(scope="session")
def einstein_maxwell(minkowski):
    return build_system(einstein_maxwell_symbol(minkowski), 5)


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props or (report.when != "call" and report.passed):
        return
    num, title = props["criterion"]
    ACCEPTANCE_LINES.append(f"criterion {num}: {'PASS' if report.passed else 'FAIL'}  {title}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
