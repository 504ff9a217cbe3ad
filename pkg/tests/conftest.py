import pytest

# criterion id -> (passed, message); filled by tests in test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    def _record(cid: int, passed: bool, message: str) -> None:
        ACCEPTANCE[cid] = (bool(passed), message)
        print(f"[criterion {cid:2d}] {'PASS' if passed else 'FAIL'}  {message}")
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        passed, message = ACCEPTANCE[cid]
        terminalreporter.write_line(f"criterion {cid:2d}: {'PASS' if passed else 'FAIL'}  {message}")
