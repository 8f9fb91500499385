"""Submatrix families, recovery-matrix assembly, and claimed delay profiles.

Three families are built here for the b1 <= b2 orientation (callers mirror
parameters otherwise):

* the extended-profile source-side family (``build_sr``),
* the relay-side family shared by both regimes (``build_rd``),
* the two-block source-side family (``build_sr2``).

Index conventions: block indices are time lags (0-based, as in the parity
convolution); matrix row/column positions are 1-based at the API boundary
(entry reports, profile symbol labels) and 0-based inside ndarray code.
"m mod n" below means the remainder in {1, ..., n}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from .gf2 import BitMatrix
from .params import CodeParams, constraint_extended, constraint_sr2


class OrientationError(ValueError):
    """Construction requires the b1 <= b2 orientation; mirror the triple."""


class ConstraintError(ValueError):
    """The regime constraint gating this construction does not hold."""


class VacuousParameterError(ValueError):
    """The requested reduced block is vacuous for these parameters."""


def _mod1(m: int, n: int) -> int:
    """Remainder of m modulo n ranging in {1, ..., n}."""
    return (m - 1) % n + 1


class LinkTag(str, Enum):
    SR = "sr"
    RD = "rd"
    SR2 = "sr2"


@dataclass(frozen=True)
class SubmatrixFamily:
    """Indexed sparse list of parity blocks for one link code.

    ``blocks`` holds only the nonzero blocks; every other index up to
    ``eff_delay`` is implicitly zero.  All blocks are k x u.
    """

    link: LinkTag
    burst_len: int
    eff_delay: int
    block_rows: int
    block_cols: int
    blocks: Mapping[int, BitMatrix]

    def block(self, i: int) -> BitMatrix:
        got = self.blocks.get(i)
        if got is not None:
            return got
        return BitMatrix.zeros(self.block_rows, self.block_cols)

    @property
    def nonzero_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.blocks))


@dataclass(frozen=True)
class DelayProfile:
    """Per-symbol recovery deadlines (position i holds symbol i+1's bound)."""

    deadlines: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.deadlines)


@dataclass(frozen=True)
class ExtendedDelayProfile:
    """Delay profile whose recovered units may combine strictly earlier symbols.

    ``combos[i]`` lists (source_symbol, lag) terms: symbol i is recovered as
    s_i[t] + sum of s_source[t - lag].  ``a_dependent`` are the symbols with
    nonempty combinations; the rest are recovered pure.
    """

    deadlines: tuple[int, ...]
    combos: Mapping[int, tuple[tuple[int, int], ...]] = field(default_factory=dict)
    a_dependent: frozenset[int] = frozenset()
    a_independent: frozenset[int] = frozenset()

    @property
    def k(self) -> int:
        return len(self.deadlines)

    @property
    def max_lag(self) -> int:
        return max((lag for terms in self.combos.values() for _, lag in terms), default=0)


def _require_orientation(params: CodeParams) -> None:
    if params.b1 > params.b2:
        raise OrientationError(
            f"b1={params.b1} > b2={params.b2}: build the mirrored (b2, b1, T) "
            "family and swap link roles"
        )


def _freeze(blocks: dict[int, np.ndarray]) -> dict[int, BitMatrix]:
    return {i: BitMatrix(a) for i, a in sorted(blocks.items()) if a.any()}


def build_sr(params: CodeParams) -> SubmatrixFamily:
    """Source-side family for the extended-profile regime (cases (i)-(iv))."""
    _require_orientation(params)
    if not constraint_extended(params):
        raise ConstraintError(
            f"extended constraint fails for ({params.b1}, {params.b2}, {params.T})"
        )
    b1, b2, p, q = params.b1, params.b2, params.p, params.q
    k = params.T - b1
    blocks: dict[int, np.ndarray] = {}

    # (i): identity bands stepping up one b2-band per b1 lag.
    for j in range(1, p):
        a = np.zeros((k, b2), dtype=np.uint8)
        top = (p - j) * b2 + q
        a[top:top + b2] = np.eye(b2, dtype=np.uint8)
        blocks[j * b1] = a

    # (ii): single-entry blocks; vacuous unless 0 < q < b1.
    if 0 < q < b1:
        for j in range(1, b1):
            a = np.zeros((k, b2), dtype=np.uint8)
            d = b2 + _mod1(j, q)
            e = q + _mod1(j, b1 - q)
            a[d - 1, e - 1] = 1
            blocks[(p - 1) * b1 + j] = a

    # (iii): I_q under the first b2 rows; vanishes at q=0.
    if q > 0:
        a = np.zeros((k, b2), dtype=np.uint8)
        a[b2:b2 + q, :q] = np.eye(q, dtype=np.uint8)
        blocks[p * b1] = a

    # (iv): I_b2 on top, zero-padded to exactly k rows.
    a = np.zeros((k, b2), dtype=np.uint8)
    a[:b2] = np.eye(b2, dtype=np.uint8)
    blocks[p * b1 + q] = a

    return SubmatrixFamily(
        link=LinkTag.SR, burst_len=b1, eff_delay=params.T - b2,
        block_rows=k, block_cols=b2, blocks=_freeze(blocks),
    )


def build_rd(params: CodeParams) -> SubmatrixFamily:
    """Relay-side family (cases (I)-(IV)); shared by both regimes."""
    _require_orientation(params)
    b2, p, q = params.b2, params.p, params.q
    k = params.T - params.b1
    blocks: dict[int, np.ndarray] = {}

    # (I): single-entry blocks in the top q rows; vanish at q=0.
    if q > 0:
        for i in range(1, b2):
            a = np.zeros((k, b2), dtype=np.uint8)
            d = _mod1(i, q)
            e = q + _mod1(i, b2 - q)
            a[d - 1, e - 1] = 1
            blocks[i] = a

        # (II): I_q in the top-left corner.
        a = np.zeros((k, b2), dtype=np.uint8)
        a[:q, :q] = np.eye(q, dtype=np.uint8)
        blocks[b2] = a

    # (III): identity bands stepping down one b2-band per b2 lag.
    for j in range(1, p + 1):
        a = np.zeros((k, b2), dtype=np.uint8)
        top = (j - 1) * b2 + q
        a[top:top + b2] = np.eye(b2, dtype=np.uint8)
        blocks[j * b2 + q] = a

    return SubmatrixFamily(
        link=LinkTag.RD, burst_len=b2, eff_delay=params.T - params.b1,
        block_rows=k, block_cols=b2, blocks=_freeze(blocks),
    )


def build_sr2(params: CodeParams) -> SubmatrixFamily:
    """Source-side family for the two-block-profile regime (cases (a)-(c))."""
    _require_orientation(params)
    if not constraint_sr2(params):
        raise ConstraintError(
            f"two-block constraint fails for ({params.b1}, {params.b2}, {params.T})"
        )
    b1, b2, p, q = params.b1, params.b2, params.p, params.q
    k = params.T - b1
    blocks: dict[int, np.ndarray] = {}

    # (a): identity bands for j in [p].
    for j in range(1, p + 1):
        a = np.zeros((k, b2), dtype=np.uint8)
        top = (p - j) * b2 + q
        a[top:top + b2] = np.eye(b2, dtype=np.uint8)
        blocks[j * b1] = a

    # (b): I_q top-left; the constraint guarantees (p+1)*b1 <= T-b2.
    if q > 0:
        a = np.zeros((k, b2), dtype=np.uint8)
        a[:q, :q] = np.eye(q, dtype=np.uint8)
        blocks[(p + 1) * b1] = a

    return SubmatrixFamily(
        link=LinkTag.SR2, burst_len=b1, eff_delay=params.T - b2,
        block_rows=k, block_cols=b2, blocks=_freeze(blocks),
    )


def assemble_recovery_matrix(
    family: SubmatrixFamily,
    burst_len: int | None = None,
    eff_delay: int | None = None,
) -> BitMatrix:
    """Banded block matrix relating erased messages to post-burst parities.

    Block row r, block column c (1-based) holds the lag-(b + c - r) block;
    unnamed lags are zero.
    """
    b = family.burst_len if burst_len is None else burst_len
    d = family.eff_delay if eff_delay is None else eff_delay
    k, u = family.block_rows, family.block_cols
    out = np.zeros((b * k, d * u), dtype=np.uint8)
    for r in range(1, b + 1):
        for c in range(1, d + 1):
            blk = family.blocks.get(b + c - r)
            if blk is not None:
                out[(r - 1) * k:r * k, (c - 1) * u:c * u] = blk.array()
    return BitMatrix(out)


def claimed_sr_profile(params: CodeParams) -> ExtendedDelayProfile:
    """Extended delay profile the source-side family is proven to satisfy."""
    _require_orientation(params)
    b1, b2, p, q = params.b1, params.b2, params.p, params.q
    deadlines = [p * b1 + q] * b2 + [p * b1] * q
    for g in range(1, p):
        deadlines += [(p - g) * b1] * b2

    combos: dict[int, list[tuple[int, int]]] = {}
    if 0 < q < b1:
        for j in range(1, b1):
            d = b2 + _mod1(j, q)
            e = q + _mod1(j, b1 - q)
            combos.setdefault(b2 + q + e, []).append((d, j))
    frozen = {sym: tuple(sorted(terms, key=lambda t: t[1]))
              for sym, terms in sorted(combos.items())}
    a_dep = frozenset(frozen)
    a_ind = frozenset(range(1, len(deadlines) + 1)) - a_dep
    return ExtendedDelayProfile(
        deadlines=tuple(deadlines), combos=frozen,
        a_dependent=a_dep, a_independent=a_ind,
    )


def claimed_rd_profile(params: CodeParams) -> DelayProfile:
    """Delay profile the relay-side family is proven to satisfy."""
    _require_orientation(params)
    b2, p, q = params.b2, params.p, params.q
    deadlines = [b2] * q
    for g in range(1, p + 1):
        deadlines += [g * b2 + q] * b2
    return DelayProfile(tuple(deadlines))


def claimed_sr2_profile(params: CodeParams) -> DelayProfile:
    """Delay profile of the two-block source-side family."""
    _require_orientation(params)
    b1, b2, p, q = params.b1, params.b2, params.p, params.q
    deadlines = [(p + 1) * b1] * q
    for g in range(p, 0, -1):
        deadlines += [g * b1] * b2
    return DelayProfile(tuple(deadlines))


def reduced_lemma4_block(params: CodeParams) -> BitMatrix:
    """Square reduction of the source-side near-boundary block grid.

    From each block of the b1 x q grid ending at lag p*b1, keep rows
    b2+1..b2+q and the first b1 columns; the result is b1*q x b1*q and is
    claimed invertible.  Vacuous unless 0 < q < b1.
    """
    if params.q == 0:
        raise VacuousParameterError("q=0: no reduced block exists")
    if params.q >= params.b1:
        raise VacuousParameterError(f"q={params.q} >= b1={params.b1}: reduction is vacuous")
    family = build_sr(params)
    b1, b2, p, q = params.b1, params.b2, params.p, params.q
    out = np.zeros((b1 * q, q * b1), dtype=np.uint8)
    for r in range(1, b1 + 1):
        for c in range(1, q + 1):
            blk = family.block(p * b1 - r + c).array()
            out[(r - 1) * q:r * q, (c - 1) * b1:c * b1] = blk[b2:b2 + q, :b1]
    return BitMatrix(out)


def reduced_lemma6_block(params: CodeParams) -> BitMatrix:
    """Square reduction of the relay-side initial block grid.

    From each block of the b2 x q grid ending at lag b2, keep the top q
    rows; the result is b2*q x b2*q and is claimed invertible.  Vacuous
    at q=0.
    """
    if params.q == 0:
        raise VacuousParameterError("q=0: no reduced block exists")
    family = build_rd(params)
    b2, q = params.b2, params.q
    out = np.zeros((b2 * q, q * b2), dtype=np.uint8)
    for r in range(1, b2 + 1):
        for c in range(1, q + 1):
            blk = family.block(b2 - r + c).array()
            out[(r - 1) * q:r * q, (c - 1) * b2:c * b2] = blk[:q, :]
    return BitMatrix(out)


def _identity_band(a: np.ndarray) -> tuple[int, int, int] | None:
    """(size, row0, col0) if the block is a single identity band of size > 1."""
    nz = np.argwhere(a)
    if len(nz) < 2:
        return None
    r0, c0 = (int(x) for x in nz[0])
    m = len(nz)
    if {(int(r), int(c)) for r, c in nz} == {(r0 + t, c0 + t) for t in range(m)}:
        return m, r0, c0
    return None


def family_dump(family: SubmatrixFamily) -> str:
    """Golden-file text format: nonzero entries plus identity-band descriptors."""
    lines = [
        f"family link={family.link.value} b={family.burst_len} "
        f"D={family.eff_delay} blocks={family.block_rows}x{family.block_cols}"
    ]
    for i in family.nonzero_indices:
        a = family.blocks[i].array()
        band = _identity_band(a)
        if band is not None:
            m, r0, c0 = band
            lines.append(f"P[{i}]: I{m} at row {r0 + 1}, col {c0 + 1}")
        else:
            for r, c in np.argwhere(a):
                lines.append(f"P[{i}] ({int(r) + 1},{int(c) + 1})=1")
    return "\n".join(lines)


def profile_dump(profile: DelayProfile | ExtendedDelayProfile) -> str:
    """One-line deadline listing plus any combined-symbol descriptions."""
    lines = ["deadlines (" + ",".join(str(d) for d in profile.deadlines) + ")"]
    if isinstance(profile, ExtendedDelayProfile):
        for sym in sorted(profile.combos):
            terms = "".join(f" + s{d}[t-{lag}]" for d, lag in profile.combos[sym])
            lines.append(f"combined: s{sym}[t]{terms} by t+{profile.deadlines[sym - 1]}")
    return "\n".join(lines)
