import pytest

from uwbsync.chanmodel import ClusterModelParams, generate


@pytest.fixture(scope="session")
def params():
    return ClusterModelParams(rng_seed=11)


@pytest.fixture(scope="session")
def cirs(params):
    return generate(params, 10)


@pytest.fixture(scope="session")
def cir(cirs):
    return cirs[0].response


# -- acceptance summary ----------------------------------------------------------

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record ``(number, passed, detail)`` for the end-of-run acceptance summary."""
    def record(number: int, title: str, passed: bool, detail: str):
        _CRITERIA[number] = (title, bool(passed), detail)
        return bool(passed)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, detail = _CRITERIA[number]
        terminalreporter.write_line(
            f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}")
