import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pov import Polity, Q, RoleProfile, medians

settings.register_profile(
    "repo", derandomize=True, max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

BOUND = 10


def rationals(lo=-BOUND, hi=BOUND, max_den=4):
    return st.builds(Fraction, st.integers(lo * max_den, hi * max_den), st.just(max_den))


@st.composite
def polities(draw, min_n=1, max_n=6):
    values = draw(st.sets(rationals(), min_size=min_n, max_size=max_n))
    return Polity(BOUND, sorted(values))


@st.composite
def polities_with_profile(draw, min_n=1, max_n=6):
    polity = draw(polities(min_n, max_n))
    proposers = draw(st.sets(st.integers(1, polity.n), max_size=polity.n))
    proposals = {a: draw(rationals()) for a in sorted(proposers)}
    return polity, RoleProfile(polity.n, proposals)


def random_polity(rng: random.Random, n: int, bound: int = BOUND) -> Polity:
    """Peaks with two decimals, drawn without repetition from ``[-bound, bound]``."""
    cents = rng.sample(range(-100 * bound, 100 * bound + 1), n)
    return Polity(bound, sorted(Q(c, 100) for c in cents))


def canonical_profile(polity: Polity) -> RoleProfile:
    m = medians(polity)
    return RoleProfile(polity.n, {a: polity.peak(a) for a in {m.left, m.right}})


def as_fractions(lottery):
    return {Fraction(str(x)): Fraction(str(p)) for x, p in lottery}


EXAMPLE_PEAKS = (-4, -3, 3, 4)


@pytest.fixture
def example_polity():
    return Polity(5, EXAMPLE_PEAKS)


@pytest.fixture
def extreme_profile():
    return RoleProfile(4, {1: -4, 4: 4})
