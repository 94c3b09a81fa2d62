import pytest

from brick14.numerics import BACKENDS

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    """Record one acceptance line; the terminal summary prints all of them."""

    def record(number: int, passed: bool, detail: str):
        _ACCEPTANCE[number] = (passed, detail)
        print(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}")

    return record


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
