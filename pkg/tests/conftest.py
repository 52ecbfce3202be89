import pytest

from mobius_orbits.moebius import build_moebius_table


@pytest.fixture(scope="session")
def table_1e6():
    return build_moebius_table(10**6)


@pytest.fixture(scope="session")
def table_1e7():
    return build_moebius_table(10**7)


@pytest.fixture(scope="session")
def small_table():
    return build_moebius_table(10**4)


_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance line and fail the test if the criterion does not hold."""

    def record(label: str, ok: bool, detail: str = ""):
        ok = bool(ok)
        _ACCEPTANCE.append((label, ok, detail))
        print(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
        assert ok, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
