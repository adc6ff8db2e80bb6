import pytest
from hypothesis import settings

from blowuplab import BumpSpec, make_config

settings.register_profile("deterministic", derandomize=True, database=None)
settings.load_profile("deterministic")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def std_cfg():
    return make_config(T=0.5, alpha=0.5)


@pytest.fixture(scope="session")
def zero_cfg():
    return make_config(T=0.5, alpha=0.5, bump=BumpSpec(amplitude=0.0), allow_degenerate=True)


@pytest.fixture(scope="session")
def cfg_factory():
    cache = {}

    def make(alpha=0.5, T=0.5, amplitude=1.0, kind="standard_mollifier"):
        key = (alpha, T, amplitude, kind)
        if key not in cache:
            cache[key] = make_config(T=T, alpha=alpha,
                                     bump=BumpSpec(kind=kind, amplitude=amplitude),
                                     allow_degenerate=amplitude == 0)
        return cache[key]

    return make


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
