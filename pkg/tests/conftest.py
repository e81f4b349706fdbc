import pytest

from defect_forge import build_table

ACCEPTANCE_LIMIT = 1_200_000
_LINES = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def big_table():
    return build_table(ACCEPTANCE_LIMIT)


@pytest.fixture(scope="session")
def table(big_table):
    """The 10^6 table, sliced from the acceptance build."""
    return big_table.prefix(10**6)


@pytest.fixture(scope="session")
def small_table():
    return build_table(20_000)


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash.setdefault(_LINES, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)

