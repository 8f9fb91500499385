"""Scalar parameter arithmetic and regime classification for (b1, b2, T) codes.

Every predicate here uses exact integer / rational arithmetic
(``fractions.Fraction``); floating point is banned because the regime
boundaries sit exactly on floor-division edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction


class ZeroRateError(ValueError):
    """T < b1 + b2: the zero-rate regime, no positive-rate code exists."""


class UndefinedParameterError(ValueError):
    """A derived quantity is undefined for these parameters (e.g. b1 = b2)."""


@dataclass(frozen=True)
class CodeParams:
    """All scalar quantities derived from a (b1, b2, T) triple.

    ``p, q`` come from T - b1 = p*b2 + q with 0 <= q < b2, and
    ``p_prime, q_prime`` from T - b2 = p'*b1 + q' with the half-open
    convention 0 < q' <= b1 (so b1 | (T - b2) yields q' = b1).
    """

    b1: int
    b2: int
    T: int
    u: int
    v: int
    p: int
    q: int
    p_prime: int
    q_prime: int
    k: int
    n: int

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n)

    def mirrored(self) -> "CodeParams":
        """Parameters of the (b2, b1, T) triple (link roles swapped)."""
        return derive(self.b2, self.b1, self.T)


def derive(b1: int, b2: int, T: int) -> CodeParams:
    """Derive all scalar parameters; rejects the zero-rate regime."""
    if b1 < 1 or b2 < 1 or T < 1:
        raise ValueError(f"parameters must be positive, got ({b1}, {b2}, {T})")
    if T < b1 + b2:
        raise ZeroRateError(
            f"T={T} < b1+b2={b1 + b2}: zero-rate regime, no code exists"
        )
    u, v = max(b1, b2), min(b1, b2)
    p, q = divmod(T - b1, b2)
    rem = (T - b2) % b1
    if rem == 0:
        p_prime, q_prime = (T - b2) // b1 - 1, b1
    else:
        p_prime, q_prime = (T - b2) // b1, rem
    k = T - v
    return CodeParams(
        b1=b1, b2=b2, T=T, u=u, v=v,
        p=p, q=q, p_prime=p_prime, q_prime=q_prime,
        k=k, n=k + u,
    )


def optimal_rate(b1: int, b2: int, T: int) -> Fraction:
    """Non-adaptive capacity: min of the two per-link rates, 0 below b1+b2."""
    if T < b1 + b2:
        return Fraction(0)
    return min(
        Fraction(T - b1, T - b1 + b2),
        Fraction(T - b2, T - b2 + b1),
    )


def constraint_extended(params: CodeParams) -> bool:
    """Extended-profile constraint: (T-u-v)/(2u-v) <= floor((T-u-v)/u)."""
    s = params.T - params.u - params.v
    return Fraction(s, 2 * params.u - params.v) <= s // params.u


def constraint_divisible(params: CodeParams) -> bool:
    """Diagonal-construction constraint: u | (T - u - v)."""
    return (params.T - params.u - params.v) % params.u == 0


def constraint_sr2(params: CodeParams) -> bool:
    """Two-block-profile constraint: (T-u)/v >= floor((T-v)/u) + 1."""
    return Fraction(params.T - params.u, params.v) >= (params.T - params.v) // params.u + 1


def constraint_sr2_sufficient(params: CodeParams) -> bool:
    """Sufficient form T >= b1 + b2 + b1*b2/|b1-b2|; undefined for b1 = b2."""
    if params.b1 == params.b2:
        raise UndefinedParameterError("b1 = b2: division by zero in b1*b2/|b1-b2|")
    return params.T >= params.b1 + params.b2 + Fraction(
        params.b1 * params.b2, abs(params.b1 - params.b2)
    )


def infeasible_region(params: CodeParams) -> bool:
    """0 < T-u-v < v: rate-optimality unattainable for convolutional codes."""
    s = params.T - params.u - params.v
    return 0 < s < params.v


class RegimeTag(str, Enum):
    EXTENDED_PROFILE = "extended"
    SR2_PROFILE = "sr2"
    DIVISIBLE = "divisible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Regime:
    """Classification outcome: one convenience tag plus all raw predicate flags.

    The flags are authoritative; the tag applies the fixed precedence
    infeasible > extended > sr2 > divisible > unknown.
    """

    tag: RegimeTag
    extended: bool
    sr2: bool
    divisible: bool
    infeasible: bool

    @property
    def constructible(self) -> bool:
        return self.extended or self.sr2


def classify(b1: int, b2: int, T: int) -> Regime:
    """Evaluate every predicate for a triple; never raises for T >= 1."""
    if T < b1 + b2:
        return Regime(RegimeTag.UNKNOWN, False, False, False, False)
    params = derive(b1, b2, T)
    extended = constraint_extended(params)
    sr2 = constraint_sr2(params)
    divisible = constraint_divisible(params)
    infeasible = infeasible_region(params)
    if infeasible:
        tag = RegimeTag.INFEASIBLE
    elif extended:
        tag = RegimeTag.EXTENDED_PROFILE
    elif sr2:
        tag = RegimeTag.SR2_PROFILE
    elif divisible:
        tag = RegimeTag.DIVISIBLE
    else:
        tag = RegimeTag.UNKNOWN
    return Regime(tag, extended, sr2, divisible, infeasible)
