"""Dense GF(2) linear algebra: bit matrices and an incremental eliminator.

``BitMatrix`` is an immutable dense binary matrix with rank / solve /
invert via Gaussian elimination on int bitsets.  ``IncrementalEliminator``
maintains a pivoted row basis where every row is tagged with the arrival
time of the equations it combines, so "when did this target first enter
the span" is answered exactly without replay.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np


class NonSquareError(ValueError):
    """Operation requires a square matrix."""


class DimensionMismatch(ValueError):
    """Vector length does not match the declared dimension."""


def _rows_to_ints(array: np.ndarray) -> list[int]:
    # Bit j of each int is column j (lowest set bit = lowest column index).
    return [int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")
            for row in array]


def _int_to_row(bits: int, cols: int) -> np.ndarray:
    raw = bits.to_bytes((cols + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8),
                         count=cols, bitorder="little")


class BitMatrix:
    """Immutable binary matrix; all arithmetic mod 2."""

    __slots__ = ("_a",)

    def __init__(self, array_like):
        a = np.asarray(array_like, dtype=np.uint8)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {a.shape}")
        if a.size and a.max() > 1:
            a = a % 2
        a = np.ascontiguousarray(a)
        a.flags.writeable = False
        self._a = a

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(np.eye(n, dtype=np.uint8))

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    def array(self) -> np.ndarray:
        """Read-only uint8 view of the entries."""
        return self._a

    def __getitem__(self, idx):
        return self._a[idx]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self._a.shape == other._a.shape and bool(np.array_equal(self._a, other._a))

    def __hash__(self):
        return hash((self._a.shape, self._a.tobytes()))

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        return BitMatrix(self._a ^ other._a)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return BitMatrix((self._a.astype(np.uint32) @ other._a.astype(np.uint32)) & 1)

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self._a.T)

    def is_zero(self) -> bool:
        return not self._a.any()

    def row_ints(self) -> list[int]:
        return _rows_to_ints(self._a)

    def rank(self) -> int:
        work = self.row_ints()
        r = 0
        for col in range(self.cols):
            mask = 1 << col
            pivot = next((i for i in range(r, len(work)) if work[i] & mask), None)
            if pivot is None:
                continue
            work[r], work[pivot] = work[pivot], work[r]
            for i in range(len(work)):
                if i != r and work[i] & mask:
                    work[i] ^= work[r]
            r += 1
            if r == len(work):
                break
        return r

    def is_invertible(self) -> bool:
        if self.rows != self.cols:
            raise NonSquareError(f"matrix is {self.rows}x{self.cols}")
        return self.rank() == self.rows

    def inv(self) -> "BitMatrix":
        """Inverse over GF(2); raises on singular or non-square input."""
        if self.rows != self.cols:
            raise NonSquareError(f"matrix is {self.rows}x{self.cols}")
        n = self.cols
        work = self.row_ints()
        aug = [1 << i for i in range(n)]
        r = 0
        for col in range(n):
            mask = 1 << col
            pivot = next((i for i in range(r, n) if work[i] & mask), None)
            if pivot is None:
                raise ValueError("matrix is singular over GF(2)")
            work[r], work[pivot] = work[pivot], work[r]
            aug[r], aug[pivot] = aug[pivot], aug[r]
            for i in range(n):
                if i != r and work[i] & mask:
                    work[i] ^= work[r]
                    aug[i] ^= aug[r]
            r += 1
        return BitMatrix(np.stack([_int_to_row(a, n) for a in aug]))

    def solve(self, rhs: Sequence[int]) -> Optional[np.ndarray]:
        """One solution x of x @ self = rhs, or None if inconsistent.

        rhs has length ``cols``; the solution has length ``rows``.
        """
        vec = np.asarray(rhs, dtype=np.uint8)
        if vec.shape != (self.cols,):
            raise DimensionMismatch(f"rhs length {vec.shape} != cols {self.cols}")
        elim = IncrementalEliminator(self.cols)
        for i, row in enumerate(self.row_ints()):
            elim.add(row, tag=0, value=0, payload=1 << i)
        hit = elim.express(_rows_to_ints(vec.reshape(1, -1))[0])
        if hit is None:
            return None
        return _int_to_row(hit.payload, self.rows)

    def to_text(self) -> str:
        """Rows of '0'/'1' characters, one line per row."""
        return "\n".join("".join("1" if b else "0" for b in row) for row in self._a)

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        return cls(np.array([[int(c) for c in ln] for ln in lines], dtype=np.uint8))

    def __repr__(self):
        return f"BitMatrix({self.rows}x{self.cols})"


def rank(m: BitMatrix) -> int:
    return m.rank()


def is_invertible(m: BitMatrix) -> bool:
    return m.is_invertible()


class Expression:
    """Result of expressing a target over the basis: tag, value, provenance."""

    __slots__ = ("tag", "value", "payload")

    def __init__(self, tag: int, value: int, payload: int):
        self.tag = tag
        self.value = value
        self.payload = payload


class _Row:
    __slots__ = ("bits", "tag", "value", "payload")

    def __init__(self, bits: int, tag: int, value: int, payload: int):
        self.bits = bits
        self.tag = tag
        self.value = value
        self.payload = payload


class IncrementalEliminator:
    """GF(2) row basis with exact earliest-expressibility bookkeeping.

    Equations must be added in nondecreasing tag order.  Each stored row
    keeps the max tag over the original equations it combines; because a
    target's expression over an independent basis is unique, the max tag
    of that expression is exactly the earliest time the target enters the
    span of the equations seen so far.

    ``payload`` is an arbitrary XOR-combinable int carried alongside each
    equation (used for provenance masks); ``value`` is the equation's
    GF(2) right-hand side.
    """

    def __init__(self, dimension: int):
        self.dimension = dimension
        self._pivots: dict[int, _Row] = {}
        self._last_tag: Optional[int] = None
        self.equations_seen = 0

    def rank(self) -> int:
        return len(self._pivots)

    def _as_bits(self, equation) -> int:
        if isinstance(equation, int):
            bits = equation
        else:
            vec = np.asarray(equation, dtype=np.uint8)
            if vec.shape != (self.dimension,):
                raise DimensionMismatch(
                    f"equation length {vec.shape} != dimension {self.dimension}"
                )
            bits = _rows_to_ints(vec.reshape(1, -1))[0]
        if bits >> self.dimension:
            raise DimensionMismatch("equation has bits beyond the declared dimension")
        return bits

    def add(self, equation, tag: int, value: int = 0, payload: int = 0) -> bool:
        """Insert one equation; returns False if it was dependent (discarded)."""
        if self._last_tag is not None and tag < self._last_tag:
            raise ValueError(f"tags must be nondecreasing: {tag} after {self._last_tag}")
        self._last_tag = tag
        self.equations_seen += 1
        bits = self._as_bits(equation)
        value &= 1
        while bits:
            low = (bits & -bits).bit_length() - 1
            row = self._pivots.get(low)
            if row is None:
                self._pivots[low] = _Row(bits, tag, value, payload)
                return True
            bits ^= row.bits
            value ^= row.value
            payload ^= row.payload
            tag = max(tag, row.tag)
        return False

    def express(self, target) -> Optional[Expression]:
        """Express target over the basis; None if outside the span."""
        bits = self._as_bits(target)
        tag = None
        value = 0
        payload = 0
        while bits:
            low = (bits & -bits).bit_length() - 1
            row = self._pivots.get(low)
            if row is None:
                return None
            bits ^= row.bits
            value ^= row.value
            payload ^= row.payload
            tag = row.tag if tag is None else max(tag, row.tag)
        return Expression(tag if tag is not None else 0, value, payload)


def eliminator_add(elim: IncrementalEliminator, equation, time_tag: int) -> IncrementalEliminator:
    """Functional-style wrapper around :meth:`IncrementalEliminator.add`."""
    elim.add(equation, tag=time_tag)
    return elim


def earliest_expressible(elim: IncrementalEliminator, target) -> Optional[int]:
    """Minimum tag at which target lies in the span, or None."""
    hit = elim.express(target)
    return None if hit is None else hit.tag
