import random
from fractions import Fraction

import pytest

import oracles
from conftest import random_polity
from pov import (
    Action,
    Deviation,
    EquilibriumCertificate,
    InstanceTooLarge,
    InvalidInput,
    Polity,
    RoleProfile,
    Verdict,
    best_response,
    candidate_values,
    certify,
    enumerate_equilibria,
    majority_vote,
    outcome_lottery,
)
from pov.engine import VoteVerdict, expected_utility
from pov.equilibrium import apply_action, iter_deviations


def oracle_improvement(peaks, bound, proposals, steps=200):
    """First improving deviation over peaks plus a fine grid, or ``None``."""
    bound = Fraction(bound)
    grid = {-bound + bound * 2 * i / steps for i in range(steps + 1)} | {Fraction(p) for p in peaks}
    base = oracles.profile_lottery(peaks, proposals)
    for agent, peak in enumerate(peaks, start=1):
        before = oracles.expected(peak, base)
        if agent in proposals:
            rest = {a: x for a, x in proposals.items() if a != agent}
            if oracles.expected(peak, oracles.profile_lottery(peaks, rest)) >= before:
                return agent, "vote"
        for v in sorted(grid):
            if proposals.get(agent) == v:
                continue
            alt = {**proposals, agent: v}
            if oracles.expected(peak, oracles.profile_lottery(peaks, alt)) > before:
                return agent, v
    return None


def test_candidate_values_contents(example_polity, extreme_profile):
    values = candidate_values(example_polity, extreme_profile, 1)
    assert 2 in values and -4 in values
    assert all(-5 <= v <= 5 for v in values)
    values = candidate_values(example_polity, extreme_profile, 2, epsilon=Fraction(1, 100))
    assert Fraction(201, 100) in values
    assert majority_vote(Fraction(201, 100), 4, [3]).verdict is VoteVerdict.FIRST_WINS
    with pytest.raises(InvalidInput):
        candidate_values(example_polity, extreme_profile, 1, epsilon=0)
    with pytest.raises(InvalidInput):
        candidate_values(example_polity, extreme_profile, 1, grid_step=-1)


def test_example_deviation_values(example_polity, extreme_profile):
    values = candidate_values(example_polity, extreme_profile, 1)
    devs = {str(d.action): d.utility_after for d in iter_deviations(example_polity, extreme_profile, 1, values)}
    assert devs["vote"] == -64
    assert devs["propose 2"] == -36
    values = candidate_values(example_polity, extreme_profile, 2)
    best = max(d.utility_after for d in iter_deviations(example_polity, extreme_profile, 2, values))
    assert best == Fraction(-98, 3)
    assert best_response(example_polity, extreme_profile, 1, values) is None


def test_best_response_examples():
    polity = Polity(1, [-1, 0, 1])
    median = RoleProfile(3, {2: 0})
    for agent in polity.agents:
        assert best_response(polity, median, agent, candidate_values(polity, median, agent)) is None
    lone = RoleProfile(3, {1: -1})
    dev = best_response(polity, lone, 2, candidate_values(polity, lone, 2))
    assert dev is not None and dev.action == Action.propose(0) and dev.utility_after == 0


@pytest.mark.parametrize(
    "peaks, proposals, equilibrium",
    [
        ((-2, 0, 5), {2: 0}, True),
        ((-4, -3, 3, 4), {2: -3, 3: 3}, True),
        ((-4, -3, 3, 4), {1: -4, 4: 4}, True),
        ((-1, 0, 1), {1: -1}, False),
        ((-1, 0, 1), {}, False),
        ((-1, 0, 1), {2: 0, 3: 1}, False),
    ],
)
def test_certify_examples(peaks, proposals, equilibrium):
    polity = Polity(5, peaks)
    cert = certify(polity, RoleProfile(len(peaks), proposals))
    assert cert.is_equilibrium is equilibrium
    assert (oracle_improvement(peaks, 5, proposals) is None) is equilibrium
    if not equilibrium and proposals == {1: -1}:
        assert cert.witness.agent == 2


def test_witness_reproduces_gain():
    rng = random.Random(5)
    checked = 0
    for _ in range(40):
        polity = random_polity(rng, rng.randint(2, 6))
        proposers = rng.sample(list(polity.agents), rng.randint(0, polity.n))
        profile = RoleProfile(polity.n, {a: polity.peak(rng.choice(list(polity.agents))) for a in proposers})
        cert = certify(polity, profile)
        if cert.is_equilibrium:
            continue
        w = cert.witness
        peak = polity.peak(w.agent)
        assert expected_utility(peak, outcome_lottery(polity, profile)) == w.utility_before
        assert expected_utility(peak, outcome_lottery(polity, apply_action(profile, w.agent, w.action))) == w.utility_after
        assert w.improves
        checked += 1
    assert checked > 10


def test_certificate_invariants():
    dev = Deviation(1, Action.propose(0), Fraction(-1), Fraction(-2))
    with pytest.raises(InvalidInput):
        EquilibriumCertificate(Verdict.REFUTED, dev)
    with pytest.raises(InvalidInput):
        EquilibriumCertificate(Verdict.REFUTED)
    tie = Deviation(1, Action.vote(), Fraction(-1), Fraction(-1))
    assert EquilibriumCertificate(Verdict.REFUTED, tie).witness.improves


def test_refinement_never_rescues():
    rng = random.Random(9)
    for _ in range(15):
        polity = random_polity(rng, 3)
        profile = RoleProfile(3, {rng.randint(1, 3): polity.peak(rng.randint(1, 3))})
        coarse = certify(polity, profile, grid_step=2)
        fine = certify(polity, profile, grid_step=Fraction(1, 10))
        if not coarse.is_equilibrium:
            assert not fine.is_equilibrium


def test_enumerate_examples():
    rows = enumerate_equilibria(Polity(1, [-1, 0, 1]), 1)
    assert [r.profile for r in rows] == [RoleProfile(3, {2: 0})]
    rows = enumerate_equilibria(Polity(2, [-2, -1, 0, 1, 2]), 2)
    assert not [r for r in rows if len(r.profile.proposers) == 2]
    rows = enumerate_equilibria(Polity(5, [-4, -3, 3, 4]), 2)
    found = {r.profile for r in rows}
    assert RoleProfile(4, {2: -3, 3: 3}) in found
    assert RoleProfile(4, {1: -4, 4: 4}) in found
    assert len({r.outcome_class for r in rows}) == len({r.lottery for r in rows})


def test_enumeration_mirror_symmetry():
    polity = Polity(5, [-4, -3, 3, 4])
    rows = {r.profile for r in enumerate_equilibria(polity, 2)}
    mirrored = {r.profile for r in enumerate_equilibria(polity.mirrored(), 2)}
    assert {p.mirrored() for p in rows} == mirrored


def test_enumeration_guards():
    with pytest.raises(InstanceTooLarge):
        enumerate_equilibria(Polity(20, range(-5, 6)), 1)
    with pytest.raises(InstanceTooLarge):
        enumerate_equilibria(Polity(100, [-100, 0, 100]), 2, grid_step=Fraction(1, 10))
