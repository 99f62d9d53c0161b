"""Propose-or-Vote applied to electing one of the agents.

Each agent either votes or nominates a candidate (possibly itself). A
candidate nominated by someone else keeps its vote as long as it did not
nominate anybody itself. The winner's peak is the implemented policy.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Optional, Sequence

from .engine import OutcomeLottery, expected_utility, pair_lottery
from .equilibrium import Action, Deviation, EquilibriumCertificate, Verdict
from .model import InstanceTooLarge, InvalidInput, Polity

MAX_AGENTS = 7


@dataclass(frozen=True)
class ElectionProfile:
    """``actions[i - 1]`` is ``None`` if agent ``i`` votes, else the candidate it nominates."""

    actions: tuple[Optional[int], ...]

    def __init__(self, actions: Iterable[Optional[int]]):
        actions = tuple(None if a is None else int(a) for a in actions)
        n = len(actions)
        for i, a in enumerate(actions, start=1):
            if a is not None and not 1 <= a <= n:
                raise InvalidInput(f"agent {i} nominates {a}, not in 1..{n}")
        object.__setattr__(self, "actions", actions)

    @classmethod
    def everyone_votes(cls, n: int) -> "ElectionProfile":
        return cls([None] * n)

    @property
    def n_agents(self) -> int:
        return len(self.actions)

    @property
    def nominators(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.actions, start=1) if a is not None)

    @property
    def candidates(self) -> tuple[int, ...]:
        return tuple(sorted({a for a in self.actions if a is not None}))

    @property
    def voters(self) -> tuple[int, ...]:
        nominating = set(self.nominators)
        tagged_vote = {i for i, a in enumerate(self.actions, start=1) if a is None}
        nominated_by_other = {
            a for i, a in enumerate(self.actions, start=1) if a is not None and a != i
        }
        return tuple(sorted(tagged_vote | (nominated_by_other - nominating)))

    def action(self, agent: int) -> Action:
        a = self.actions[agent - 1]
        return Action.vote() if a is None else Action.nominate(a)

    def with_action(self, agent: int, candidate: Optional[int]) -> "ElectionProfile":
        actions = list(self.actions)
        actions[agent - 1] = candidate
        return ElectionProfile(actions)

    def mirrored(self) -> "ElectionProfile":
        n = self.n_agents
        return ElectionProfile(
            None if a is None else n + 1 - a for a in reversed(self.actions)
        )

    def __str__(self) -> str:
        return " ".join("v" if a is None else str(a) for a in self.actions)


def _check(polity: Polity, profile: ElectionProfile) -> None:
    if profile.n_agents != polity.n:
        raise InvalidInput(
            f"profile has {profile.n_agents} agents but the polity has {polity.n}"
        )


def _outcome(peaks: tuple, candidates: tuple[int, ...], voters: tuple[int, ...]) -> OutcomeLottery:
    if not candidates:
        return OutcomeLottery.uniform(peaks)
    values = [peaks[c - 1] for c in candidates]
    if len(values) == 1:
        return OutcomeLottery.point(values[0])
    if not voters:
        return OutcomeLottery.uniform(values)
    return pair_lottery(values, [peaks[v - 1] for v in voters])


def election_outcome(polity: Polity, profile: ElectionProfile) -> OutcomeLottery:
    """Distribution over the peaks of elected candidates."""
    _check(polity, profile)
    return _outcome(polity.peaks, profile.candidates, profile.voters)


def _improves(action: Optional[int], before, after) -> bool:
    if action is None:
        return after >= before
    return after > before


def certify_election(polity: Polity, profile: ElectionProfile) -> EquilibriumCertificate:
    """Try all ``n + 1`` actions of every agent; indifference resolves toward voting."""
    _check(polity, profile)
    outcome = lru_cache(maxsize=None)(lambda c, v: _outcome(polity.peaks, c, v))
    return _certify(polity, profile, outcome)


def _certify(polity: Polity, profile: ElectionProfile, outcome) -> EquilibriumCertificate:
    lottery = outcome(profile.candidates, profile.voters)
    options: Sequence[Optional[int]] = (None, *polity.agents)
    for agent in polity.agents:
        peak = polity.peak(agent)
        before = expected_utility(peak, lottery)
        current = profile.actions[agent - 1]
        for choice in options:
            if choice == current:
                continue
            alt = profile.with_action(agent, choice)
            after = expected_utility(peak, outcome(alt.candidates, alt.voters))
            if _improves(choice, before, after):
                action = Action.vote() if choice is None else Action.nominate(choice)
                return EquilibriumCertificate(
                    Verdict.REFUTED, Deviation(agent, action, before, after)
                )
    return EquilibriumCertificate(Verdict.EQUILIBRIUM)


@dataclass(frozen=True)
class ElectionEquilibrium:
    profile: ElectionProfile
    certificate: EquilibriumCertificate
    lottery: OutcomeLottery


def enumerate_election_equilibria(polity: Polity) -> list[ElectionEquilibrium]:
    """Exhaustive scan of all ``(n + 1) ** n`` pure action profiles."""
    if polity.n > MAX_AGENTS:
        raise InstanceTooLarge(f"{polity.n} agents exceed the guard of {MAX_AGENTS}")
    outcome = lru_cache(maxsize=None)(lambda c, v: _outcome(polity.peaks, c, v))
    found = []
    for actions in product((None, *polity.agents), repeat=polity.n):
        profile = ElectionProfile(actions)
        cert = _certify(polity, profile, outcome)
        if cert.is_equilibrium:
            found.append(
                ElectionEquilibrium(profile, cert, outcome(profile.candidates, profile.voters))
            )
    return found
