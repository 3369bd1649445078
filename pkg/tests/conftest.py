import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from funclust.metric import random_metric_space

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def metric_spaces(draw, min_n=1, max_n=8, kind="mixed"):
    """Random strict metric spaces, reproducible from a drawn seed."""
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(min_n, max_n))
    return random_metric_space(np.random.default_rng(seed), n, kind)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
