import pytest

_LINES_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES_KEY] = []


@pytest.fixture
def verdict(request):
    """Record one ``PASS/FAIL <criterion>: detail`` line for the summary."""
    lines = request.config.stash[_LINES_KEY]

    def record(name, passed, detail=""):
        line = f"{'PASS' if passed else 'FAIL'} {name}" + (f": {detail}" if detail else "")
        lines.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
