import pytest

from prevadim.cantor import CantorConfig, build_levels
from prevadim.labeling import make_rng

# criterion number -> (ok, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def tower2():
    return build_levels(CantorConfig.tower(2))


@pytest.fixture(scope="session")
def tower3():
    return build_levels(CantorConfig.tower(3))


@pytest.fixture(scope="session")
def deep():
    from prevadim.lemmas import energy_levels
    return energy_levels()


@pytest.fixture
def rng():
    return make_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")
