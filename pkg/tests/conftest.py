import pytest

_CRITERIA = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion and assert it.

    ``criterion(number, passed, detail)`` stores a pass/fail line that is
    printed in the terminal summary, then fails the test if ``passed`` is false.
    """
    results = request.config.stash.setdefault(_CRITERIA, {})

    def record(number, passed, detail):
        results[number] = (bool(passed), detail)
        assert passed, f"criterion {number}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_CRITERIA, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        passed, detail = results[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
