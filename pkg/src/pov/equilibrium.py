"""Certification and enumeration of pure-strategy equilibria.

Stage-3 behaviour is fixed to sincere voting, so a strategy profile is a
:class:`~pov.engine.RoleProfile`. A profile is certified when no agent gains
from any action in a finite candidate set.

The candidate set is built from the breakpoints of the vote: a proposal ``v``
facing a standing proposal ``x`` changes a voter's ballot only when ``v``
crosses the reflection ``2*theta - x``. Between two breakpoints the outcome
pattern is fixed and the deviator's payoff is concave in ``v``, so its best
value there is either the deviator's own peak or a point just inside the
nearest breakpoint. Peaks, reflections, reflections shifted by +-epsilon and
a uniform grid therefore cover every deviation up to an O(epsilon) loss.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from math import floor
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .engine import OutcomeLottery, Role, RoleProfile, check_profile, expected_utility, outcome_lottery
from .model import InstanceTooLarge, InvalidInput, Number, Polity, Q, as_rational

Evaluator = Callable[[Polity, RoleProfile], OutcomeLottery]

MAX_AGENTS = 10
MAX_GRID_POINTS = 200


def default_epsilon(polity: Polity) -> Q:
    return polity.bound / 1000


def default_grid_step(polity: Polity) -> Q:
    return polity.bound / 50


@dataclass(frozen=True)
class Action:
    """A stage-1/2 choice: vote, propose a policy, or nominate a candidate."""

    role: Role
    value: Optional[Q] = None
    candidate: Optional[int] = None

    @classmethod
    def vote(cls) -> "Action":
        return cls(Role.VOTE)

    @classmethod
    def propose(cls, value: Number) -> "Action":
        return cls(Role.PROPOSE, as_rational(value))

    @classmethod
    def nominate(cls, candidate: int) -> "Action":
        return cls(Role.PROPOSE, candidate=candidate)

    @property
    def is_vote(self) -> bool:
        return self.role is Role.VOTE

    def __str__(self) -> str:
        if self.is_vote:
            return "vote"
        if self.candidate is not None:
            return f"nominate {self.candidate}"
        return f"propose {self.value}"


@dataclass(frozen=True)
class Deviation:
    agent: int
    action: Action
    utility_before: Q
    utility_after: Q

    @property
    def gain(self) -> Q:
        return self.utility_after - self.utility_before

    @property
    def improves(self) -> bool:
        # An agent indifferent between proposing and voting votes.
        if self.action.is_vote:
            return self.utility_after >= self.utility_before
        return self.utility_after > self.utility_before


class Verdict(enum.Enum):
    EQUILIBRIUM = "equilibrium"
    REFUTED = "refuted"


@dataclass(frozen=True)
class EquilibriumCertificate:
    verdict: Verdict
    witness: Optional[Deviation] = None

    def __post_init__(self):
        if self.verdict is Verdict.REFUTED:
            if self.witness is None or not self.witness.improves:
                raise InvalidInput("a refutation needs an improving witness")
        elif self.witness is not None:
            raise InvalidInput("an equilibrium certificate carries no witness")

    @property
    def is_equilibrium(self) -> bool:
        return self.verdict is Verdict.EQUILIBRIUM


@dataclass(frozen=True)
class DeviationCandidateSet:
    """Alternative actions of one agent, in the order they are tried."""

    agent: int
    values: tuple[Q, ...]
    actions: tuple[Action, ...]


@lru_cache(maxsize=64)
def _grid(bound: Q, step: Q) -> tuple[Q, ...]:
    count = floor(2 * bound / step)
    points = [-bound + k * step for k in range(count + 1)]
    if points[-1] != bound:
        points.append(bound)
    return tuple(points)


def grid_points(bound: Q, step: Q) -> list[Q]:
    """``-bound, -bound + step, ...`` up to ``bound``, always including ``bound``."""
    if step <= 0:
        raise InvalidInput(f"grid step must be positive, got {step}")
    return list(_grid(as_rational(bound), as_rational(step)))


def _resolve_steps(polity: Polity, epsilon, grid_step) -> tuple[Q, Q]:
    epsilon = default_epsilon(polity) if epsilon is None else as_rational(epsilon)
    grid_step = default_grid_step(polity) if grid_step is None else as_rational(grid_step)
    if epsilon <= 0:
        raise InvalidInput(f"epsilon must be positive, got {epsilon}")
    if grid_step <= 0:
        raise InvalidInput(f"grid step must be positive, got {grid_step}")
    return epsilon, grid_step


def breakpoint_values(
    polity: Polity,
    profile: RoleProfile,
    deviator: int,
    epsilon: Q,
    extra_voter_peaks: Sequence[Q] = (),
) -> list[Q]:
    """Peaks, standing proposals, their reflections and the +-epsilon shifts."""
    bound = polity.bound
    centres = set(polity.peaks).union(extra_voter_peaks)
    standing = {x for agent, x in profile.proposals if agent != deviator}
    reflections = {2 * c - x for c in centres for x in standing}

    anchors = sorted(
        {v for v in centres | standing | reflections if -bound <= v <= bound} | {-bound, bound}
    )
    gaps = [q - p for p, q in zip(anchors, anchors[1:])]
    if gaps:
        epsilon = min(epsilon, min(gaps) / 2)

    values = set(polity.peaks) | {-bound, bound}
    for r in reflections | standing:
        values.update((r, r - epsilon, r + epsilon))
    return sorted(v for v in values if -bound <= v <= bound)


def candidate_values(
    polity: Polity,
    profile: RoleProfile,
    deviator: int,
    epsilon: Number | None = None,
    grid_step: Number | None = None,
    extra_voter_peaks: Sequence[Number] = (),
) -> list[Q]:
    """Finite set of proposal values worth trying for ``deviator``.

    ``extra_voter_peaks`` adds reflection centres for voters outside the
    polity (the artificial tie-breaker). The shift is reduced to half the
    smallest gap between breakpoints when ``epsilon`` is too coarse to stay
    inside a single piece.
    """
    epsilon, grid_step = _resolve_steps(polity, epsilon, grid_step)
    polity.peak(deviator)
    extra = [as_rational(x) for x in extra_voter_peaks]
    values = set(breakpoint_values(polity, profile, deviator, epsilon, extra))
    values.update(_grid(polity.bound, grid_step))
    return sorted(values)


def deviation_candidates(
    profile: RoleProfile,
    agent: int,
    own_peak: Q,
    values: Iterable[Q],
    role_switch: bool = True,
) -> DeviationCandidateSet:
    """Order the agent's alternatives: role switch first, then values nearest its peak."""
    current = profile.proposal(agent)
    actions = []
    if current is not None and role_switch:
        actions.append(Action.vote())
    ordered = sorted(set(values), key=lambda v: (abs(v - own_peak), v))
    actions.extend(Action.propose(v) for v in ordered if v != current)
    return DeviationCandidateSet(agent, tuple(ordered), tuple(actions))


def apply_action(profile: RoleProfile, agent: int, action: Action) -> RoleProfile:
    if action.is_vote:
        return profile.with_vote(agent)
    return profile.with_proposal(agent, action.value)


def iter_deviations(
    polity: Polity,
    profile: RoleProfile,
    agent: int,
    candidates: Iterable[Q],
    evaluate: Evaluator = outcome_lottery,
    role_switch: bool = True,
    before: Optional[Q] = None,
) -> Iterator[Deviation]:
    """Every candidate action of ``agent`` with its payoff, others held fixed."""
    peak = polity.peak(agent)
    if before is None:
        before = expected_utility(peak, evaluate(polity, profile))
    for action in deviation_candidates(profile, agent, peak, candidates, role_switch).actions:
        after = expected_utility(peak, evaluate(polity, apply_action(profile, agent, action)))
        yield Deviation(agent, action, before, after)


def best_response(
    polity: Polity,
    profile: RoleProfile,
    agent: int,
    candidates: Iterable[Q],
    evaluate: Evaluator = outcome_lottery,
) -> Optional[Deviation]:
    """The most profitable improving deviation of ``agent``, or ``None``."""
    best = None
    for dev in iter_deviations(polity, profile, agent, candidates, evaluate):
        if dev.improves and (best is None or dev.utility_after > best.utility_after):
            best = dev
    return best


def certify(
    polity: Polity,
    profile: RoleProfile,
    epsilon: Number | None = None,
    grid_step: Number | None = None,
    *,
    evaluate: Evaluator = outcome_lottery,
    extra_voter_peaks: Sequence[Number] = (),
) -> EquilibriumCertificate:
    """Check every agent's candidate deviations.

    Deviations are tried in sweeps of growing cost over all agents: switching
    to vote, proposing one's own peak, the breakpoint values, then the grid.
    The scan stops at the first improving deviation, so the witness is *an*
    improvement, not necessarily the largest one (see :func:`best_response`).
    An ``EQUILIBRIUM`` verdict is relative to the finite candidate set.
    """
    check_profile(polity, profile)
    epsilon, grid_step = _resolve_steps(polity, epsilon, grid_step)
    extra = [as_rational(x) for x in extra_voter_peaks]
    lottery = evaluate(polity, profile)
    grid = _grid(polity.bound, grid_step)

    def sweeps(agent):
        own = polity.peak(agent)
        yield [], True
        yield [own], False
        breakpoints = breakpoint_values(polity, profile, agent, epsilon, extra)
        yield [v for v in breakpoints if v != own], False
        seen = set(breakpoints)
        yield [v for v in grid if v not in seen], False

    pending = [sweeps(agent) for agent in polity.agents]
    for _ in range(4):
        for agent, sweep in zip(polity.agents, pending):
            values, role_switch = next(sweep)
            for dev in iter_deviations(
                polity, profile, agent, values, evaluate, role_switch,
                expected_utility(polity.peak(agent), lottery),
            ):
                if dev.improves:
                    return EquilibriumCertificate(Verdict.REFUTED, dev)
    return EquilibriumCertificate(Verdict.EQUILIBRIUM)


@dataclass(frozen=True)
class EquilibriumRecord:
    profile: RoleProfile
    certificate: EquilibriumCertificate
    lottery: OutcomeLottery
    outcome_class: int = 0


def _median_bracket(peaks: Sequence[Q]) -> tuple[Q, Q]:
    ordered = sorted(peaks)
    k = len(ordered)
    if k % 2:
        return ordered[k // 2], ordered[k // 2]
    return ordered[k // 2 - 1], ordered[k // 2]


def proposal_grid(
    polity: Polity,
    proposer: int,
    voter_peaks: Sequence[Q],
    grid_step: Q,
) -> list[Q]:
    """Grid points and peaks between the proposer's peak and the median voter.

    Equilibrium proposals can be taken from this interval without loss of
    generality when there is a unique median voter; with an even voter count
    both middle voters bound the interval. Without voters every proposal is
    drawn with the same probability whatever its value, so only the
    proposer's own peak is kept.
    """
    own = polity.peak(proposer)
    if not voter_peaks:
        return [own]
    lo_mv, hi_mv = _median_bracket(voter_peaks)
    lo, hi = min(own, lo_mv), max(own, hi_mv)
    points = {v for v in grid_points(polity.bound, grid_step) if lo <= v <= hi}
    points.update(p for p in polity.peaks if lo <= p <= hi)
    if len(points) > MAX_GRID_POINTS:
        raise InstanceTooLarge(
            f"{len(points)} proposal values for agent {proposer} exceed the guard of {MAX_GRID_POINTS}"
        )
    return sorted(points)


def role_profiles(n: int, min_proposers: int, max_proposers: int) -> Iterator[tuple[int, ...]]:
    for k in range(min_proposers, max_proposers + 1):
        yield from combinations(range(1, n + 1), k)


def enumerate_equilibria(
    polity: Polity,
    max_proposers: int,
    epsilon: Number | None = None,
    grid_step: Number | None = None,
    *,
    min_proposers: int = 0,
    evaluate: Evaluator = outcome_lottery,
    extra_voter_peaks: Sequence[Q] = (),
) -> list[EquilibriumRecord]:
    """All certified profiles with between ``min_proposers`` and ``max_proposers`` proposers.

    Rows are sorted by proposer count, then proposers and proposal values.
    Profiles sharing an outcome lottery get the same ``outcome_class``.
    """
    if polity.n > MAX_AGENTS:
        raise InstanceTooLarge(f"{polity.n} agents exceed the guard of {MAX_AGENTS}")
    if not 0 <= min_proposers <= max_proposers:
        raise InvalidInput("need 0 <= min_proposers <= max_proposers")
    max_proposers = min(max_proposers, polity.n)
    grid_step = default_grid_step(polity) if grid_step is None else as_rational(grid_step)
    extra = tuple(as_rational(x) for x in extra_voter_peaks)

    found = []
    for proposers in role_profiles(polity.n, min_proposers, max_proposers):
        voter_peaks = [p for a, p in zip(polity.agents, polity.peaks) if a not in proposers]
        voter_peaks += extra
        grids = [proposal_grid(polity, p, voter_peaks, grid_step) for p in proposers]
        for values in product(*grids):
            profile = RoleProfile(polity.n, zip(proposers, values))
            cert = certify(
                polity, profile, epsilon, grid_step, evaluate=evaluate, extra_voter_peaks=extra
            )
            if cert.is_equilibrium:
                found.append((profile, cert, evaluate(polity, profile)))

    found.sort(key=lambda row: (len(row[0].proposals), row[0].proposals))
    classes: dict[OutcomeLottery, int] = {}
    return [
        EquilibriumRecord(profile, cert, lottery, classes.setdefault(lottery, len(classes)))
        for profile, cert, lottery in found
    ]
