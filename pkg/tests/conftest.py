import pytest

from ising_feedback.analytic import default_params

ACCEPTANCE = []


def record(number, title, ok, detail=""):
    ACCEPTANCE.append((number, title, bool(ok), detail))


@pytest.fixture(scope="session")
def params():
    return default_params()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}: {detail}")
