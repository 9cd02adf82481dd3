import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from seirlab.model import ModifiedSeirParams

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")

# Ranges used for random parameter draws throughout the suite.
RANGES = {
    "tau": (1e-3, 0.1),
    "mu": (1e-3, 0.05),
    "beta": (0.05, 1.0),
    "epsilon": (0.01, 0.5),
    "gamma": (0.01, 0.5),
}


def draw_params(rng: np.random.Generator) -> ModifiedSeirParams:
    return ModifiedSeirParams(**{k: rng.uniform(lo, hi) for k, (lo, hi) in RANGES.items()})


def param_draws(n: int, seed: int, condition=None):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        p = draw_params(rng)
        if condition is None or condition(p):
            out.append(p)
    return out


@st.composite
def modified_params(draw):
    return ModifiedSeirParams(
        **{k: draw(st.floats(lo, hi, allow_nan=False, allow_infinity=False)) for k, (lo, hi) in RANGES.items()}
    )


@pytest.fixture
def table3():
    return ModifiedSeirParams.table3()


# Acceptance results are collected here and printed in the terminal summary.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
