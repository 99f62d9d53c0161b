"""Sequential-elimination variant with an artificial tie-breaking voter.

When the number of agents is even, an artificial voter with a caller-chosen
peak joins the voters; it never proposes. All proposals then enter a
knock-out sequence: a random first pair, after which the survivor meets a
challenger drawn uniformly from the proposals not yet drawn, until one is
left. The distribution over survivors is enumerated exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Mapping, Optional, Sequence

from .engine import (
    HALF,
    OutcomeLottery,
    RoleProfile,
    VoteVerdict,
    check_profile,
    majority_vote,
)
from .equilibrium import (
    EquilibriumCertificate,
    EquilibriumRecord,
    certify,
    enumerate_equilibria,
)
from .model import InstanceTooLarge, InvalidInput, Number, Polity, Q, as_rational, medians

MAX_PROPOSALS = 8


class AIMode(enum.Enum):
    """How the artificial voter takes part in a duel."""

    TIE_BREAK = "tie-break"  # votes only when the real voters draw
    ALWAYS = "always"  # casts a regular ballot in every duel


@dataclass(frozen=True)
class AugmentedPolity:
    base: Polity
    artificial_peak: Optional[Q] = None
    mode: AIMode = AIMode.TIE_BREAK

    def __post_init__(self):
        even = self.base.n % 2 == 0
        if even != (self.artificial_peak is not None):
            raise InvalidInput("an artificial voter is present exactly when n is even")
        if self.artificial_peak is not None and not self.base.contains(self.artificial_peak):
            raise InvalidInput(
                f"artificial peak {self.artificial_peak} lies outside "
                f"[-{self.base.bound}, {self.base.bound}]"
            )

    @property
    def participants(self) -> int:
        return self.base.n + (self.artificial_peak is not None)

    @property
    def extra_voter_peaks(self) -> tuple[Q, ...]:
        return () if self.artificial_peak is None else (self.artificial_peak,)


def augment(polity: Polity, artificial_peak: Number, mode: AIMode = AIMode.TIE_BREAK) -> AugmentedPolity:
    """Attach the artificial voter when ``polity`` has an even number of agents.

    For odd ``n`` the peak is ignored and no voter is added.
    """
    if polity.n % 2:
        return AugmentedPolity(polity, None, mode)
    peak = as_rational(artificial_peak)
    if not polity.contains(peak):
        raise InvalidInput(f"artificial peak {peak} lies outside [-{polity.bound}, {polity.bound}]")
    return AugmentedPolity(polity, peak, mode)


@dataclass(frozen=True)
class EliminationState:
    """Current survivor, proposers already knocked out, and those not yet drawn."""

    surviving: int
    discarded: frozenset[int] = field(default_factory=frozenset)
    remaining: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.surviving in self.discarded or self.surviving in self.remaining:
            raise InvalidInput("the survivor cannot also be discarded or waiting")
        if self.discarded & self.remaining:
            raise InvalidInput("discarded and remaining proposers overlap")

    def after_duel(self, challenger: int, winner: int) -> "EliminationState":
        loser = challenger if winner == self.surviving else self.surviving
        return EliminationState(
            winner, self.discarded | {loser}, self.remaining - {challenger}
        )


def duel(
    first: Q,
    second: Q,
    voter_peaks: Sequence[Q],
    artificial_peak: Optional[Q] = None,
    mode: AIMode = AIMode.TIE_BREAK,
) -> tuple[Q, Q]:
    """Probabilities that ``first`` resp. ``second`` survives a head-to-head vote."""
    voters = list(voter_peaks)
    if artificial_peak is not None and mode is AIMode.ALWAYS:
        voters.append(artificial_peak)
    verdict = majority_vote(first, second, voters).verdict
    if verdict is VoteVerdict.DRAW and artificial_peak is not None and mode is AIMode.TIE_BREAK:
        verdict = majority_vote(first, second, [artificial_peak]).verdict
    if verdict is VoteVerdict.FIRST_WINS:
        return Q(1), Q(0)
    if verdict is VoteVerdict.SECOND_WINS:
        return Q(0), Q(1)
    return HALF, HALF


def condorcet_winner(
    proposals: Mapping[int, Number],
    voter_peaks: Sequence[Number],
    artificial_peak: Optional[Number] = None,
    mode: AIMode = AIMode.TIE_BREAK,
) -> Optional[int]:
    """The proposer whose proposal wins every duel outright, if any."""
    if not proposals:
        raise InvalidInput("need at least one proposal")
    values = {p: as_rational(x) for p, x in proposals.items()}
    voters = [as_rational(t) for t in voter_peaks]
    ai = None if artificial_peak is None else as_rational(artificial_peak)
    for p, x in sorted(values.items()):
        if all(
            duel(x, y, voters, ai, mode)[0] == 1 for q, y in values.items() if q != p
        ):
            return p
    return None


def elimination_winner_distribution(
    proposals: Mapping[int, Number],
    voter_peaks: Sequence[Number],
    artificial_peak: Optional[Number] = None,
    mode: AIMode = AIMode.TIE_BREAK,
) -> OutcomeLottery:
    """Exact distribution of the last surviving proposer.

    The first pair is uniform over unordered pairs; each later challenger is
    uniform over the proposals not yet drawn. Draws that the artificial voter
    does not settle are decided by a fair coin.
    """
    if not proposals:
        raise InvalidInput("need at least one proposal")
    if len(proposals) > MAX_PROPOSALS:
        raise InstanceTooLarge(f"{len(proposals)} proposals exceed the guard of {MAX_PROPOSALS}")
    values = {p: as_rational(x) for p, x in proposals.items()}
    voters = [as_rational(t) for t in voter_peaks]
    ai = None if artificial_peak is None else as_rational(artificial_peak)
    ids = sorted(values)
    if len(ids) == 1:
        return OutcomeLottery.point(ids[0])

    @lru_cache(maxsize=None)
    def beats(a: int, b: int) -> tuple[Q, Q]:
        return duel(values[a], values[b], voters, ai, mode)

    @lru_cache(maxsize=None)
    def finish(surviving: int, remaining: frozenset[int]) -> dict[int, Q]:
        if not remaining:
            return {surviving: Q(1)}
        share = Q(1, len(remaining))
        acc: dict[int, Q] = {}
        for challenger in sorted(remaining):
            state = EliminationState(surviving, remaining=remaining)
            for winner, p in zip((surviving, challenger), beats(surviving, challenger)):
                if p:
                    nxt = state.after_duel(challenger, winner)
                    for who, q in finish(nxt.surviving, nxt.remaining).items():
                        acc[who] = acc.get(who, Q(0)) + share * p * q
        return acc

    everyone = frozenset(ids)
    weight = Q(1, comb(len(ids), 2))
    total: dict[int, Q] = {}
    for a, b in combinations(ids, 2):
        rest = everyone - {a, b}
        for winner, p in zip((a, b), beats(a, b)):
            if p:
                for who, q in finish(winner, rest).items():
                    total[who] = total.get(who, Q(0)) + weight * p * q
    return OutcomeLottery.from_weights(total)


def tournament_lottery(augmented: AugmentedPolity, profile: RoleProfile) -> OutcomeLottery:
    """Distribution of the implemented policy under the elimination procedure."""
    polity = augmented.base
    check_profile(polity, profile)
    proposals = profile.as_dict()
    if not proposals:
        return OutcomeLottery.uniform(polity.peaks)
    if len(proposals) == 1:
        return OutcomeLottery.point(next(iter(proposals.values())))
    voter_peaks = [polity.peaks[v - 1] for v in profile.voters]
    winners = elimination_winner_distribution(
        proposals, voter_peaks, augmented.artificial_peak, augmented.mode
    )
    return winners.map(proposals.__getitem__)


@dataclass(frozen=True)
class TournamentEvaluator:
    """Adapter giving :func:`tournament_lottery` the evaluator signature."""

    augmented: AugmentedPolity

    def __call__(self, polity: Polity, profile: RoleProfile) -> OutcomeLottery:
        return tournament_lottery(self.augmented, profile)


def certify_tournament(
    augmented: AugmentedPolity,
    profile: RoleProfile,
    epsilon: Number | None = None,
    grid_step: Number | None = None,
) -> EquilibriumCertificate:
    return certify(
        augmented.base,
        profile,
        epsilon,
        grid_step,
        evaluate=TournamentEvaluator(augmented),
        extra_voter_peaks=augmented.extra_voter_peaks,
    )


def enumerate_tournament_equilibria(
    augmented: AugmentedPolity,
    max_proposers: int,
    epsilon: Number | None = None,
    grid_step: Number | None = None,
    *,
    min_proposers: int = 0,
) -> list[EquilibriumRecord]:
    return enumerate_equilibria(
        augmented.base,
        max_proposers,
        epsilon,
        grid_step,
        min_proposers=min_proposers,
        evaluate=TournamentEvaluator(augmented),
        extra_voter_peaks=augmented.extra_voter_peaks,
    )


def predicted_equilibrium(augmented: AugmentedPolity) -> Optional[RoleProfile]:
    """The median participant proposing its own peak, if that participant is a real agent."""
    polity = augmented.base
    if augmented.artificial_peak is None:
        m = medians(polity).mid
        return RoleProfile(polity.n, {m: polity.peak(m)})
    everyone = sorted(polity.peaks + (augmented.artificial_peak,))
    middle = everyone[len(everyone) // 2]
    if middle == augmented.artificial_peak and middle not in polity.peaks:
        return None
    agent = polity.peaks.index(middle) + 1
    return RoleProfile(polity.n, {agent: middle})


@dataclass(frozen=True)
class UniquenessReport:
    equilibria: tuple[EquilibriumRecord, ...]
    predicted: Optional[RoleProfile]

    @property
    def unique(self) -> bool:
        return len(self.equilibria) == 1

    @property
    def confirms_prediction(self) -> bool:
        return self.unique and self.equilibria[0].profile == self.predicted


def uniqueness_report(
    augmented: AugmentedPolity,
    epsilon: Number | None = None,
    grid_step: Number | None = None,
    max_proposers: int = 2,
) -> UniquenessReport:
    """Every certified equilibrium under elimination semantics, next to the predicted one."""
    rows = enumerate_tournament_equilibria(augmented, max_proposers, epsilon, grid_step)
    return UniquenessReport(tuple(rows), predicted_equilibrium(augmented))
