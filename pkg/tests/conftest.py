import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def record_acceptance():
    def record(result):
        line = result.line()
        print(line)
        for d in result.details():
            print(d)
        ACCEPTANCE_LINES.append(line)
        return result

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
