import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, checks)``.

    ``checks`` is a list of ``(label, ok, detail)``; the line is printed
    immediately and again in the terminal summary, then the test asserts.
    """
    lines = request.config.stash[_LINES]

    def report(number, title, checks):
        ok = all(c[1] for c in checks)
        parts = "; ".join(f"{label}: {detail} [{'ok' if good else 'FAIL'}]" for label, good, detail in checks)
        line = f"criterion {number} {'PASS' if ok else 'FAIL'} ({title}) {parts}"
        lines.append(line)
        print(line)
        failed = [label for label, good, _ in checks if not good]
        assert ok, f"criterion {number} failed: {', '.join(failed)}"

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
