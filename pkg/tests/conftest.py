import pytest

from hemsched.domain import default_problem, with_resolution

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def household():
    return default_problem()


@pytest.fixture(scope="session")
def household30(household):
    return with_resolution(household, 30)


@pytest.fixture
def record_criterion():
    def record(number, passed, detail):
        _ACCEPTANCE.append((number, passed, detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
