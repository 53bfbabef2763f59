import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tpk import PairSpec, Projector, generate_pair

from .oracles import line_projector

settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def theta_pair(theta):
    """P = diag(1, 0) and Q the line at angle ``theta`` in C^2."""
    p = Projector.from_matrix(np.diag([1.0, 0.0]))
    q = Projector.from_matrix(line_projector(theta))
    return p, q


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def pi4_pair():
    return theta_pair(np.pi / 4)


@st.composite
def pair_specs(draw, max_dim=12):
    dim = draw(st.integers(1, max_dim))
    shared = draw(st.integers(0, dim))
    rank_p = draw(st.integers(shared, dim))
    rank_q = draw(st.integers(shared, dim - rank_p + shared))
    seed = draw(st.integers(0, 2**32 - 1))
    return PairSpec(dim, rank_p, rank_q, shared, seed)


@st.composite
def projector_pairs(draw, max_dim=12):
    spec = draw(pair_specs(max_dim))
    return (spec, *generate_pair(spec))


def pytest_terminal_summary(terminalreporter):
    """Print one PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], outcome.upper()[:4], props.get("detail", "")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for crit, status, detail in sorted(lines):
            terminalreporter.write_line(f"criterion {crit}: {status}  {detail}")
