"""Acceptance criteria 1-8, one printed PASS/FAIL line each.

Random instances come from fixed seeds, so every run checks the same cases.
"""

import random
from collections import Counter
from fractions import Fraction

from scipy import stats

import oracles
from conftest import canonical_profile, random_polity
from pov import (
    ElectionProfile,
    Polity,
    Q,
    RoleProfile,
    augment,
    candidate_values,
    certify,
    condorcet_winner,
    election_outcome,
    elimination_winner_distribution,
    enumerate_election_equilibria,
    enumerate_equilibria,
    expected_utilities,
    outcome_lottery,
    sample_outcomes,
    uniqueness_report,
)
from pov.equilibrium import iter_deviations


def report(number, ok, detail):
    print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def test_criterion_1_golden_counterexample():
    polity = Polity(5, [-4, -3, 3, 4])
    profile = RoleProfile(4, {1: -4, 4: 4})
    lottery = outcome_lottery(polity, profile)
    utilities = expected_utilities(polity, lottery)
    agent1 = {
        str(d.action): d.utility_after
        for d in iter_deviations(polity, profile, 1, candidate_values(polity, profile, 1))
    }
    agent2_best = max(
        d.utility_after
        for d in iter_deviations(polity, profile, 2, candidate_values(polity, profile, 2))
        if not d.action.is_vote
    )
    cert = certify(polity, profile)
    checks = {
        "lottery": lottery.as_dict() == {-4: Fraction(1, 2), 4: Fraction(1, 2)},
        "utilities": [str(utilities[a]) for a in (1, 2, 3, 4)] == ["-32", "-25", "-25", "-32"],
        "vote -64": agent1.get("vote") == -64,
        "propose 2 -36": agent1.get("propose 2") == -36,
        "agent 2 <= -98/3": agent2_best <= Fraction(-98, 3),
        "certificate": cert.is_equilibrium,
    }
    failed = [k for k, v in checks.items() if not v]
    report(1, not failed, f"agent 2 best proposal {agent2_best}; failed: {failed or 'none'}")


def test_criterion_2_canonical_profiles():
    rng = random.Random(2002)
    failures = []
    total = 0
    for n in range(2, 10):
        for _ in range(100):
            polity = random_polity(rng, n)
            total += 1
            if not certify(polity, canonical_profile(polity)).is_equilibrium:
                failures.append(polity.peaks)
    report(2, not failures, f"{total} polities, N=2..9, {len(failures)} refuted")


def test_criterion_3_single_proposer():
    rng = random.Random(3003)
    bad = []
    total = 0
    for n in (3, 5, 7):
        for _ in range(20):
            polity = random_polity(rng, n)
            m = (n + 1) // 2
            rows = enumerate_equilibria(polity, 1, min_proposers=1)
            total += 1
            if [r.profile for r in rows] != [RoleProfile(n, {m: polity.peak(m)})]:
                bad.append((polity.peaks, [str(r.profile) for r in rows]))
    report(3, not bad, f"{total} polities, N in 3,5,7, {len(bad)} with extra or missing rows")


def test_criterion_4_no_two_proposer_equilibria():
    rng = random.Random(4004)
    found = []
    for i in range(50):
        polity = random_polity(rng, (3, 5, 7)[i % 3])
        rows = enumerate_equilibria(polity, 2, min_proposers=2)
        found.extend(str(r.profile) for r in rows)
    report(4, not found, f"50 odd polities, {len(found)} two-proposer equilibria")


def test_criterion_5_condorcet_implementation():
    rng = random.Random(5005)
    configs = with_winner = bad = 0
    for _ in range(1500):
        k = rng.randint(1, 6)
        proposals = {p: Q(rng.randint(-40, 40), 4) for p in range(1, k + 1)}
        voters = [Q(rng.randint(-40, 40), 4) for _ in range(rng.randint(1, 7))]
        ai = Q(rng.randint(-40, 40), 4) if len(voters) % 2 == 0 else None
        configs += 1
        winner = condorcet_winner(proposals, voters, ai)
        if winner != oracles.condorcet(proposals, voters, ai):
            bad += 1
            continue
        if winner is not None:
            with_winner += 1
            if elimination_winner_distribution(proposals, voters, ai).as_dict() != {winner: 1}:
                bad += 1
    report(5, bad == 0 and configs >= 1000, f"{configs} configurations, {with_winner} with a winner, {bad} mismatches")


def test_criterion_6_tournament_uniqueness():
    rng = random.Random(6006)
    bad = []
    total = 0
    for n in (3, 5, 7):
        for _ in range(8):
            polity = random_polity(rng, n)
            result = uniqueness_report(augment(polity, 0))
            m = (n + 1) // 2
            total += 1
            if not (result.unique and result.equilibria[0].profile == RoleProfile(n, {m: polity.peak(m)})):
                bad.append((polity.peaks, [str(r.profile) for r in result.equilibria]))
    report(6, not bad, f"{total} polities, N in 3,5,7, up to two proposers, {len(bad)} not unique")


def _random_profile(rng, polity):
    proposers = rng.sample(list(polity.agents), rng.randint(0, polity.n))
    return RoleProfile(polity.n, {a: Q(rng.randint(-1000, 1000), 100) for a in proposers})


def test_criterion_7_engine_properties():
    rng = random.Random(7007)
    problems = Counter()
    for _ in range(400):
        polity = random_polity(rng, rng.randint(1, 8))
        profile = _random_profile(rng, polity)
        lottery = outcome_lottery(polity, profile)
        if sum(p for _, p in lottery) != 1:
            problems["normalization"] += 1
        mirrored = outcome_lottery(polity.mirrored(), profile.mirrored())
        if mirrored.as_dict() != {-x: p for x, p in lottery}:
            problems["mirror"] += 1
        a, b = Q(rng.randint(1, 9), rng.randint(1, 4)), Q(rng.randint(-9, 9), rng.randint(1, 4))
        moved = Polity(a * polity.bound + abs(b), [a * x + b for x in polity.peaks])
        moved_profile = RoleProfile(polity.n, {k: a * v + b for k, v in profile.proposals})
        if outcome_lottery(moved, moved_profile).as_dict() != {a * x + b: p for x, p in lottery}:
            problems["affine"] += 1
    rejections = scenarios = 0
    while scenarios < 20:
        polity = random_polity(rng, rng.randint(3, 8))
        profile = _random_profile(rng, polity)
        exact = outcome_lottery(polity, profile)
        if len(exact) < 2:
            continue
        scenarios += 1
        n = 100_000
        draws = Counter(sample_outcomes(polity, profile, n, seed=scenarios))
        if set(draws) - set(exact.support):
            problems["support"] += 1
        _, pvalue = stats.chisquare([draws[x] for x, _ in exact], [float(p) * n for _, p in exact])
        rejections += pvalue < 0.001
    ok = not problems and rejections <= 1
    report(7, ok, f"400 exact checks, problems {dict(problems) or 'none'}; chi-square rejections {rejections}/20")


def test_criterion_8_elections():
    rng = random.Random(8008)
    mismatches = 0
    for _ in range(100):
        polity = random_polity(rng, rng.randint(1, 8))
        nominators = set(rng.sample(list(polity.agents), rng.randint(0, polity.n)))
        election = ElectionProfile(a if a in nominators else None for a in polity.agents)
        baseline = RoleProfile(polity.n, {a: polity.peak(a) for a in nominators})
        mismatches += election_outcome(polity, election) != outcome_lottery(polity, baseline)
    scan = {str(e.profile) for e in enumerate_election_equilibria(Polity(1, [-1, 0, 1]))}
    ok = mismatches == 0 and "v 2 v" in scan
    report(8, ok, f"100 self-nomination profiles, {mismatches} mismatches; N=3 scan {sorted(scan)}")
