"""Exact evaluation of the baseline Propose-or-Vote procedure.

Given who proposes (and what), :func:`outcome_lottery` returns the exact
distribution over implemented policies: the random pair draw, sincere voting
with abstention on indifference, and the coin flip on a draw are all
integrated out with rational weights.
"""

from __future__ import annotations

import enum
import random
from bisect import bisect_left, bisect_right
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence, Union

from .model import InvalidInput, Number, Polity, Q, as_rational


class Role(enum.Enum):
    PROPOSE = "propose"
    VOTE = "vote"


@dataclass(frozen=True)
class RoleProfile:
    """Stage-1 roles and stage-2 proposals of all ``n_agents`` agents.

    Agents listed in ``proposals`` propose; everybody else votes. Proposals
    are stored as a sorted tuple of ``(agent, value)`` pairs so profiles are
    hashable and compare by value.
    """

    n_agents: int
    proposals: tuple[tuple[int, Q], ...] = ()

    def __init__(
        self,
        n_agents: int,
        proposals: Union[Mapping[int, Number], Iterable[tuple[int, Number]]] = (),
    ):
        if isinstance(proposals, Mapping):
            proposals = proposals.items()
        items: dict[int, Q] = {}
        for agent, value in proposals:
            agent = int(agent)
            if not 1 <= agent <= n_agents:
                raise InvalidInput(f"proposer {agent} is not in 1..{n_agents}")
            if agent in items:
                raise InvalidInput(f"agent {agent} submits two proposals")
            items[agent] = as_rational(value)
        object.__setattr__(self, "n_agents", int(n_agents))
        object.__setattr__(self, "proposals", tuple(sorted(items.items())))

    @property
    def proposers(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.proposals)

    @property
    def voters(self) -> tuple[int, ...]:
        taken = set(self.proposers)
        return tuple(a for a in range(1, self.n_agents + 1) if a not in taken)

    @property
    def roles(self) -> tuple[Role, ...]:
        taken = set(self.proposers)
        return tuple(
            Role.PROPOSE if a in taken else Role.VOTE for a in range(1, self.n_agents + 1)
        )

    def role(self, agent: int) -> Role:
        return Role.PROPOSE if agent in self.proposers else Role.VOTE

    def proposal(self, agent: int) -> Q | None:
        return dict(self.proposals).get(agent)

    def as_dict(self) -> dict[int, Q]:
        return dict(self.proposals)

    def with_proposal(self, agent: int, value: Number) -> "RoleProfile":
        items = self.as_dict()
        items[agent] = as_rational(value)
        return RoleProfile(self.n_agents, items)

    def with_vote(self, agent: int) -> "RoleProfile":
        items = self.as_dict()
        items.pop(agent, None)
        return RoleProfile(self.n_agents, items)

    def mirrored(self) -> "RoleProfile":
        """Profile of the mirrored polity: agent ``i`` -> ``n + 1 - i``, ``x -> -x``."""
        n = self.n_agents
        return RoleProfile(n, {n + 1 - a: -x for a, x in self.proposals})

    def __str__(self) -> str:
        if not self.proposals:
            return "no proposers"
        return ", ".join(f"{a}:{x}" for a, x in self.proposals)


def check_profile(polity: Polity, profile: RoleProfile) -> None:
    if profile.n_agents != polity.n:
        raise InvalidInput(
            f"profile has {profile.n_agents} agents but the polity has {polity.n}"
        )
    for agent, x in profile.proposals:
        if not polity.contains(x):
            raise InvalidInput(
                f"proposal {x} of agent {agent} lies outside [-{polity.bound}, {polity.bound}]"
            )


@dataclass(frozen=True)
class OutcomeLottery:
    """A finite distribution with exact probabilities.

    Atoms are kept sorted by outcome; outcomes are usually policy values but
    may be any sortable hashable (the elimination procedure uses proposer ids).
    """

    atoms: tuple[tuple[Any, Q], ...]

    def __post_init__(self):
        outcomes = [x for x, _ in self.atoms]
        if len(set(outcomes)) != len(outcomes):
            raise InvalidInput("lottery outcomes must be distinct")
        if any(p <= 0 for _, p in self.atoms):
            raise InvalidInput("lottery probabilities must be positive")
        if sum(p for _, p in self.atoms) != 1:
            raise InvalidInput("lottery probabilities must sum to 1")

    @classmethod
    def from_weights(cls, weights: Mapping[Hashable, Q]) -> "OutcomeLottery":
        """Build from an outcome -> probability map, dropping zero weights."""
        return cls(tuple(sorted((x, Q(p)) for x, p in weights.items() if p)))

    @classmethod
    def point(cls, outcome: Hashable) -> "OutcomeLottery":
        return cls(((outcome, Q(1)),))

    @classmethod
    def uniform(cls, outcomes: Sequence[Hashable]) -> "OutcomeLottery":
        """Uniform over the sequence; repeated outcomes accumulate weight."""
        if not outcomes:
            raise InvalidInput("uniform lottery over no outcomes")
        share = Q(1, len(outcomes))
        weights: dict[Hashable, Q] = defaultdict(Q)
        for x in outcomes:
            weights[x] += share
        return cls.from_weights(weights)

    def __iter__(self) -> Iterator[tuple[Any, Q]]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __getitem__(self, outcome: Hashable) -> Q:
        return self.as_dict().get(outcome, Q(0))

    @property
    def support(self) -> tuple[Any, ...]:
        return tuple(x for x, _ in self.atoms)

    def as_dict(self) -> dict[Any, Q]:
        return dict(self.atoms)

    def map(self, fn: Callable[[Any], Hashable]) -> "OutcomeLottery":
        weights: dict[Hashable, Q] = defaultdict(Q)
        for x, p in self.atoms:
            weights[fn(x)] += p
        return OutcomeLottery.from_weights(weights)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{x}: {p}" for x, p in self.atoms) + "}"


class VoteVerdict(enum.Enum):
    FIRST_WINS = "first"
    SECOND_WINS = "second"
    DRAW = "draw"


@dataclass(frozen=True)
class VoteResult:
    tally_first: int
    tally_second: int
    abstentions: int
    verdict: VoteVerdict


def majority_vote(first: Number, second: Number, voter_peaks: Iterable[Number]) -> VoteResult:
    """Sincere pairwise vote; voters equidistant from both policies abstain."""
    first, second = as_rational(first), as_rational(second)
    n_first = n_second = n_abstain = 0
    for theta in voter_peaks:
        theta = as_rational(theta)
        d1, d2 = abs(first - theta), abs(second - theta)
        if d1 < d2:
            n_first += 1
        elif d2 < d1:
            n_second += 1
        else:
            n_abstain += 1
    if n_first > n_second:
        verdict = VoteVerdict.FIRST_WINS
    elif n_second > n_first:
        verdict = VoteVerdict.SECOND_WINS
    else:
        verdict = VoteVerdict.DRAW
    return VoteResult(n_first, n_second, n_abstain, verdict)


HALF = Q(1, 2)


def resolve_pair(first: Q, second: Q, voter_peaks: Sequence[Q]) -> dict[Q, Q]:
    """Probability that each of two policies is implemented once put to a vote."""
    verdict = majority_vote(first, second, voter_peaks).verdict
    if verdict is VoteVerdict.FIRST_WINS:
        return {first: Q(1)}
    if verdict is VoteVerdict.SECOND_WINS:
        return {second: Q(1)}
    if first == second:
        return {first: Q(1)}
    return {first: HALF, second: HALF}


def pair_lottery(proposals: Sequence[Q], voter_peaks: Sequence[Q]) -> OutcomeLottery:
    """Uniform random pair of proposals, decided by sincere majority vote.

    A voter prefers the lower of two distinct policies exactly when its peak
    lies below their midpoint, so each pair is tallied by bisecting the
    sorted doubled peaks against ``a + b``.
    """
    doubled = sorted(2 * t for t in voter_peaks)
    n = len(doubled)
    weight = Q(1, comb(len(proposals), 2))
    half = weight / 2
    acc: dict[Q, Q] = defaultdict(Q)
    for a, b in combinations(proposals, 2):
        if a == b:
            acc[a] += weight
            continue
        if b < a:
            a, b = b, a
        mid = a + b
        below = bisect_left(doubled, mid)
        above = n - bisect_right(doubled, mid)
        if below > above:
            acc[a] += weight
        elif above > below:
            acc[b] += weight
        else:
            acc[a] += half
            acc[b] += half
    return OutcomeLottery.from_weights(acc)


def outcome_lottery(polity: Polity, profile: RoleProfile) -> OutcomeLottery:
    """Exact distribution of the implemented policy under the baseline procedure."""
    check_profile(polity, profile)
    proposals = [x for _, x in profile.proposals]
    if not proposals:
        return OutcomeLottery.uniform(polity.peaks)
    if len(proposals) == 1:
        return OutcomeLottery.point(proposals[0])
    voter_peaks = [polity.peaks[v - 1] for v in profile.voters]
    if not voter_peaks:
        return OutcomeLottery.uniform(proposals)
    return pair_lottery(proposals, voter_peaks)


def expected_utility(peak: Number, lottery: OutcomeLottery) -> Q:
    peak = as_rational(peak)
    total = Q(0)
    for x, p in lottery.atoms:
        d = x - peak
        total -= p * d * d
    return total


def expected_utilities(polity: Polity, lottery: OutcomeLottery) -> dict[int, Q]:
    return {a: expected_utility(polity.peak(a), lottery) for a in polity.agents}


class _Sampler:
    """Simulates the procedure draw by draw; pair verdicts are memoised."""

    def __init__(self, polity: Polity, profile: RoleProfile):
        check_profile(polity, profile)
        self.peaks = polity.peaks
        self.proposals = [x for _, x in profile.proposals]
        self.voter_peaks = [polity.peaks[v - 1] for v in profile.voters]
        self._verdicts: dict[tuple[int, int], VoteVerdict] = {}

    def draw(self, rng: random.Random) -> Q:
        proposals = self.proposals
        if not proposals:
            return rng.choice(self.peaks)
        if len(proposals) == 1:
            return proposals[0]
        i, j = rng.sample(range(len(proposals)), 2)
        if not self.voter_peaks:
            verdict = VoteVerdict.DRAW
        else:
            verdict = self._verdicts.get((i, j))
            if verdict is None:
                verdict = majority_vote(proposals[i], proposals[j], self.voter_peaks).verdict
                self._verdicts[(i, j)] = verdict
        if verdict is VoteVerdict.FIRST_WINS:
            return proposals[i]
        if verdict is VoteVerdict.SECOND_WINS:
            return proposals[j]
        return proposals[i] if rng.random() < 0.5 else proposals[j]


def sample_outcome(polity: Polity, profile: RoleProfile, seed: int) -> Q:
    """One run of the procedure driven by ``random.Random(seed)``."""
    return _Sampler(polity, profile).draw(random.Random(seed))


def sample_outcomes(polity: Polity, profile: RoleProfile, n: int, seed: int) -> list[Q]:
    """``n`` independent runs from a single seeded stream."""
    rng = random.Random(seed)
    sampler = _Sampler(polity, profile)
    return [sampler.draw(rng) for _ in range(n)]
