import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from hconv.series import TruncatedSeries

# every property runs at least 200 cases from a fixed seed
settings.register_profile(
    "fixed",
    max_examples=200,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("fixed")


@st.composite
def random_series(draw, order=32, decay=None, zero_constant=False, min_constant=None):
    """Series with |c_n| <= 1, optionally scaled by decay**n."""
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    mod = rng.uniform(0, 1, order + 1)
    arg = rng.uniform(0, 2 * np.pi, order + 1)
    c = mod * np.exp(1j * arg)
    if decay is not None:
        c = c * decay ** np.arange(order + 1)
    if zero_constant:
        c[0] = 0
    if min_constant is not None:
        c[0] = rng.uniform(min_constant, 1) * np.exp(1j * arg[0])
    return TruncatedSeries(c)


@pytest.fixture
def order():
    return 64


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
