import numpy as np
import pytest

from relaystream.channel import (
    ErasurePattern,
    all_admissible_patterns,
    apply,
    empty_pattern,
    enumerate_single_bursts,
    parse_burst_literal,
    single_burst,
    validate,
    violating_window,
)


def test_validate_single_burst_anywhere():
    for start in range(0, 18):
        assert validate(single_burst(20, start, 3) if start <= 17 else None, 3, 7)


def test_validate_rejects_long_burst():
    assert not validate(single_burst(20, 4, 4), 3, 7)


def test_validate_rejects_two_bursts_in_one_window():
    pat = ErasurePattern(24, frozenset({2, 3, 8}))
    assert not validate(pat, 3, 7)
    assert violating_window(pat, 3, 7) is not None
    # Far enough apart: last erased slot of run 1 plus T+1.
    ok = ErasurePattern(24, frozenset({2, 3, 12}))
    assert validate(ok, 3, 7)


def test_enumeration_count_and_validity():
    pats = list(enumerate_single_bursts(5, 1, 7))
    assert len(pats) == 6  # empty pattern plus 5 singletons
    assert list(enumerate_single_bursts(9, 0, 5)) == [empty_pattern(9)]
    for horizon, b in ((12, 3), (20, 4)):
        pats = list(enumerate_single_bursts(horizon, b, 6))
        assert len(pats) == horizon * b - b * (b - 1) // 2 + 1
        assert all(validate(p, b, 6) for p in pats)
        assert len({frozenset(p.erased) for p in pats}) == len(pats)


def test_bruteforce_matches_single_burst_enumeration():
    horizon, b, t = 10, 2, 4
    filtered = {p.erased for p in all_admissible_patterns(horizon, b, t)}
    singles = {p.erased for p in enumerate_single_bursts(horizon, b, t)}
    assert singles <= filtered
    multi = [e for e in filtered - singles]
    # Every extra admissible set has several runs separated beyond a window.
    assert multi
    for erased in multi:
        runs = ErasurePattern(horizon, erased).runs()
        assert len(runs) >= 2
        for (s1, l1), (s2, _) in zip(runs, runs[1:]):
            assert s2 - (s1 + l1 - 1) > t  # next run outside every shared window


def test_apply_marks_and_idempotence():
    packets = np.arange(12, dtype=np.uint8).reshape(6, 2) % 2
    pat = single_burst(6, 1, 2)
    got = apply(packets, pat)
    assert not got.received[1] and not got.received[2]
    assert got.received[0] and got.packet(0) is not None
    assert got.packet(1) is None
    again = apply(got, pat)
    assert np.array_equal(again.values, got.values)
    assert np.array_equal(again.received, got.received)
    clean = apply(packets, empty_pattern(6))
    assert np.array_equal(clean.values, packets)


def test_parse_burst_literal():
    assert parse_burst_literal("3:2", 10).erased == frozenset({3, 4})
    assert parse_burst_literal("none", 10).erased == frozenset()
    with pytest.raises(ValueError):
        parse_burst_literal("3-2", 10)
    with pytest.raises(ValueError):
        parse_burst_literal("9:4", 10)
