"""Polity, quadratic utility and median helpers shared by the rest of the package.

Agents are identified by 1-based indices, ordered by peak: agent ``i`` has peak
``polity.peaks[i - 1]``. All numbers are carried as exact rationals (``Q``:
``gmpy2.mpq`` when available, otherwise :class:`fractions.Fraction`) so that
draws, abstentions and utility ties are decided exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction

Number = Union[int, float, str, Fraction]


class PovError(Exception):
    """Base class for errors raised by this package."""


class InvalidInput(PovError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateConfiguration(InvalidInput):
    """The requested quantity is undefined for this configuration."""


class InstanceTooLarge(PovError):
    """An exhaustive scan would exceed its tractability guard."""


def as_rational(value: Number) -> Q:
    """Convert ``value`` to an exact rational.

    Floats are read through their shortest decimal repr, so ``0.1`` becomes
    ``1/10`` rather than the binary expansion. Strings may be decimals or
    ``"p/q"``.
    """
    if isinstance(value, bool):
        raise InvalidInput(f"expected a number, got {value!r}")
    if isinstance(value, Q):
        return value
    if isinstance(value, Rational):
        return Q(int(value.numerator), int(value.denominator))
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise InvalidInput(f"non-finite number {value!r}")
        return Q(Fraction(repr(value)))
    if isinstance(value, str):
        try:
            return Q(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"cannot parse {value!r} as a rational") from exc
    raise InvalidInput(f"expected a number, got {type(value).__name__}")


@dataclass(frozen=True)
class Polity:
    """Agents' peaks on the policy interval ``[-bound, bound]``."""

    bound: Q
    peaks: tuple[Q, ...]

    def __init__(self, bound: Number, peaks: Iterable[Number]):
        bound = as_rational(bound)
        peaks = tuple(as_rational(p) for p in peaks)
        if bound <= 0:
            raise InvalidInput(f"bound must be positive, got {bound}")
        if not peaks:
            raise InvalidInput("a polity needs at least one agent")
        for i, (a, b) in enumerate(zip(peaks, peaks[1:]), start=1):
            if not a < b:
                raise InvalidInput(
                    f"peaks must be strictly increasing: peak {i} = {a} "
                    f"is not below peak {i + 1} = {b}"
                )
        for i, p in enumerate(peaks, start=1):
            if not -bound <= p <= bound:
                raise InvalidInput(f"peak {i} = {p} lies outside [-{bound}, {bound}]")
        object.__setattr__(self, "bound", bound)
        object.__setattr__(self, "peaks", peaks)

    @property
    def n(self) -> int:
        return len(self.peaks)

    @property
    def agents(self) -> range:
        return range(1, self.n + 1)

    def peak(self, agent: int) -> Q:
        if not 1 <= agent <= self.n:
            raise InvalidInput(f"agent {agent} is not in 1..{self.n}")
        return self.peaks[agent - 1]

    def contains(self, policy: Q) -> bool:
        return -self.bound <= policy <= self.bound

    def mirrored(self) -> "Polity":
        """The polity reflected through 0; agent ``i`` becomes ``n + 1 - i``."""
        return Polity(self.bound, [-p for p in reversed(self.peaks)])


@dataclass(frozen=True)
class MedianTriple:
    left: int
    mid: int
    right: int


def utility(peak: Number, policy: Number) -> Q:
    """Quadratic single-peaked utility ``-(policy - peak)**2``."""
    d = as_rational(policy) - as_rational(peak)
    return -d * d


def medians(polity: Polity) -> MedianTriple:
    """Left, middle and right median agents.

    For odd ``n`` all three coincide. For even ``n`` the middle index is
    reported as the left median, since no agent sits at the exact centre.
    """
    n = polity.n
    if n % 2:
        m = (n + 1) // 2
        return MedianTriple(m, m, m)
    return MedianTriple(n // 2, n // 2, n // 2 + 1)


def median_of_voters(polity: Polity, voters: Iterable[int]) -> tuple[int, int]:
    """Left and right median among ``voters`` (equal when the count is odd)."""
    ordered = sorted(set(voters))
    if not ordered:
        raise DegenerateConfiguration("median of an empty voter set is undefined")
    for v in ordered:
        polity.peak(v)
    k = len(ordered)
    if k % 2:
        mv = ordered[k // 2]
        return mv, mv
    return ordered[k // 2 - 1], ordered[k // 2]
