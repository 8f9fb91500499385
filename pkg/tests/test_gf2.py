import numpy as np
import pytest

from relaystream.gf2 import (
    BitMatrix,
    DimensionMismatch,
    IncrementalEliminator,
    NonSquareError,
    earliest_expressible,
    eliminator_add,
)


def det_by_expansion(a: np.ndarray) -> int:
    """Brute-force GF(2) determinant via Laplace expansion (oracle)."""
    n = a.shape[0]
    if n == 1:
        return int(a[0, 0])
    total = 0
    for j in range(n):
        if a[0, j]:
            minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
            total ^= det_by_expansion(minor)
    return total


def test_rank_basics():
    assert BitMatrix.identity(4).rank() == 4
    assert BitMatrix.zeros(3, 5).rank() == 0


def test_is_invertible_basics():
    assert BitMatrix.identity(5).is_invertible()
    assert not BitMatrix.zeros(4, 4).is_invertible()
    with pytest.raises(NonSquareError):
        BitMatrix.zeros(2, 3).is_invertible()


def test_invertibility_matches_determinant_oracle():
    rng = np.random.default_rng(11)
    for _ in range(120):
        n = int(rng.integers(1, 7))
        a = rng.integers(0, 2, size=(n, n), dtype=np.uint8)
        assert BitMatrix(a).is_invertible() == bool(det_by_expansion(a))


def test_rank_transpose_invariant():
    rng = np.random.default_rng(5)
    for _ in range(40):
        r, c = rng.integers(1, 30, size=2)
        a = rng.integers(0, 2, size=(int(r), int(c)), dtype=np.uint8)
        m = BitMatrix(a)
        assert m.rank() == m.transpose().rank()


def test_inverse_round_trip():
    rng = np.random.default_rng(7)
    found = 0
    while found < 10:
        a = rng.integers(0, 2, size=(8, 8), dtype=np.uint8)
        m = BitMatrix(a)
        if not m.is_invertible():
            continue
        found += 1
        assert m @ m.inv() == BitMatrix.identity(8)


def test_solve():
    m = BitMatrix([[1, 0, 1], [0, 1, 1]])
    x = m.solve([1, 1, 0])
    assert x is not None
    assert np.array_equal((x.astype(np.uint32) @ m.array().astype(np.uint32)) & 1,
                          [1, 1, 0])
    assert m.solve([0, 0, 1]) is None


def test_text_round_trip():
    m = BitMatrix([[1, 0, 1], [0, 1, 0]])
    assert m.to_text() == "101\n010"
    assert BitMatrix.from_text(m.to_text()) == m


def test_eliminator_duplicate_and_independent():
    elim = IncrementalEliminator(4)
    assert elim.add([1, 1, 0, 0], tag=0)
    assert not elim.add([1, 1, 0, 0], tag=1)  # dependent, discarded
    assert elim.rank() == 1
    eliminator_add(elim, [0, 0, 1, 1], time_tag=2)
    assert elim.rank() == 2


def test_earliest_expressible_examples():
    elim = IncrementalEliminator(3)
    elim.add([1, 1, 0], tag=3)
    elim.add([0, 1, 1], tag=5)
    assert earliest_expressible(elim, [1, 1, 0]) == 3
    assert earliest_expressible(elim, [1, 0, 1]) == 5  # sum of both rows
    assert earliest_expressible(elim, [0, 0, 1]) is None


def test_eliminator_rejects_decreasing_tags_and_bad_length():
    elim = IncrementalEliminator(3)
    elim.add([1, 0, 0], tag=2)
    with pytest.raises(ValueError):
        elim.add([0, 1, 0], tag=1)
    with pytest.raises(DimensionMismatch):
        elim.add([1, 0], tag=3)


def test_earliest_is_monotone_under_insertion():
    rng = np.random.default_rng(31)
    dim = 12
    targets = [rng.integers(0, 2, size=dim, dtype=np.uint8) for _ in range(8)]
    elim = IncrementalEliminator(dim)
    best = [None] * len(targets)
    for tag in range(40):
        elim.add(rng.integers(0, 2, size=dim, dtype=np.uint8), tag=tag)
        for idx, tgt in enumerate(targets):
            now = earliest_expressible(elim, tgt)
            if best[idx] is not None:
                assert now is not None and now <= best[idx]
            if now is not None:
                best[idx] = now if best[idx] is None else min(best[idx], now)


def test_eliminator_values_match_dense_solution():
    rng = np.random.default_rng(13)
    for _ in range(20):
        n = 10
        a = rng.integers(0, 2, size=(n, n), dtype=np.uint8)
        x = rng.integers(0, 2, size=n, dtype=np.uint8)
        b = (a.astype(np.uint32) @ x.astype(np.uint32)) & 1
        elim = IncrementalEliminator(n)
        for i in range(n):
            elim.add(a[i], tag=i, value=int(b[i]))
        for j in range(n):
            unit = np.zeros(n, dtype=np.uint8)
            unit[j] = 1
            hit = elim.express(unit)
            if hit is not None:
                assert hit.value == x[j]
