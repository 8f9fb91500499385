import itertools

import numpy as np
import pytest

from relaystream.constructions import (
    ConstraintError,
    OrientationError,
    SubmatrixFamily,
    VacuousParameterError,
    assemble_recovery_matrix,
    build_rd,
    build_sr,
    build_sr2,
    claimed_rd_profile,
    claimed_sr2_profile,
    claimed_sr_profile,
    family_dump,
    reduced_lemma4_block,
    reduced_lemma6_block,
)
from relaystream.gf2 import BitMatrix
from relaystream.params import classify, derive


def zeros(r, c=4):
    return np.zeros((r, c), dtype=np.uint8)


def stack(*parts):
    return np.vstack(parts)


def single(r, c, rows=9, cols=4):
    a = np.zeros((rows, cols), dtype=np.uint8)
    a[r - 1, c - 1] = 1
    return a


# Displayed matrices of the worked (3, 4, 12) example, written out literally.
EX1_SR = {
    3: stack(zeros(5), np.eye(4, dtype=np.uint8)),
    4: single(5, 2),
    5: single(5, 3),
    6: single(5, 1),
    7: stack(np.eye(4, dtype=np.uint8), zeros(5)),
}
EX1_RD = {
    1: single(1, 2),
    2: single(1, 3),
    3: single(1, 4),
    4: single(1, 1),
    5: stack(zeros(1), np.eye(4, dtype=np.uint8), zeros(4)),
    9: stack(zeros(5), np.eye(4, dtype=np.uint8)),
}


def test_example1_sr_blocks_bit_exact():
    fam = build_sr(derive(3, 4, 12))
    assert fam.nonzero_indices == (3, 4, 5, 6, 7)
    for i, expect in EX1_SR.items():
        assert fam.block(i) == BitMatrix(expect), f"P[{i}] differs"
    assert fam.block(8).is_zero() and fam.block(0).is_zero()


def test_example1_entry_arithmetic():
    # d = b2 + (j mod q), e = q + (j mod (b1-q)) with remainders in [n].
    fam = build_sr(derive(3, 4, 12))
    assert fam.block(4)[4, 1] == 1  # d = 4 + (1 mod 1) = 5, e = 1 + (1 mod 2) = 2
    assert fam.block(5)[4, 2] == 1  # e = 1 + (2 mod 2) = 3


def test_example1_rd_blocks_bit_exact():
    fam = build_rd(derive(3, 4, 12))
    assert fam.nonzero_indices == (1, 2, 3, 4, 5, 9)
    for i, expect in EX1_RD.items():
        assert fam.block(i) == BitMatrix(expect), f"P'[{i}] differs"
    for i in (6, 7, 8):
        assert fam.block(i).is_zero()


def test_sr2_blocks_2_3_7():
    fam = build_sr2(derive(2, 3, 7))
    assert fam.nonzero_indices == (2, 4)
    p2 = np.zeros((5, 3), dtype=np.uint8)
    p2[2:, :] = np.eye(3, dtype=np.uint8)
    p4 = np.zeros((5, 3), dtype=np.uint8)
    p4[:2, :2] = np.eye(2, dtype=np.uint8)
    assert fam.block(2) == BitMatrix(p2)
    assert fam.block(4) == BitMatrix(p4)
    assert fam.block(3).is_zero()  # unnamed odd index


def test_divisible_degenerate_q0():
    # (3,4,11): q=0, so the single-entry and I_q blocks vanish and the
    # terminal index p*b1 carries the top identity band.
    fam = build_sr(derive(3, 4, 11))
    assert fam.nonzero_indices == (3, 6)
    top = np.zeros((8, 4), dtype=np.uint8)
    top[:4] = np.eye(4, dtype=np.uint8)
    assert fam.block(6) == BitMatrix(top)
    rd = build_rd(derive(3, 4, 11))
    assert rd.nonzero_indices == (4, 8)


def test_orientation_and_constraint_errors():
    with pytest.raises(OrientationError):
        build_sr(derive(4, 3, 12))
    with pytest.raises(ConstraintError):
        build_sr(derive(3, 4, 13))
    with pytest.raises(ConstraintError):
        build_sr2(derive(3, 4, 12))


def _valid_oriented_params(b_hi=8, t_hi=64):
    for b1, b2 in itertools.product(range(1, b_hi + 1), repeat=2):
        if b1 > b2:
            continue
        for t in range(b1 + b2, t_hi + 1):
            yield derive(b1, b2, t), classify(b1, b2, t)


def test_block_shape_identity_sweep():
    for p, reg in _valid_oriented_params(6, 40):
        fams = []
        if reg.extended:
            fams.append(build_sr(p))
        if reg.sr2:
            fams.append(build_sr2(p))
        if reg.constructible:
            fams.append(build_rd(p))
        for fam in fams:
            for i, blk in fam.blocks.items():
                assert 0 < i <= fam.eff_delay
                assert blk.shape == (p.T - p.b1, p.b2)


def test_assemble_example1_shape_and_toeplitz():
    p = derive(3, 4, 12)
    fam = build_sr(p)
    m = assemble_recovery_matrix(fam)
    assert m.shape == (3 * 9, 8 * 4)
    a = m.array()
    for r in range(2):
        for c in range(7):
            assert np.array_equal(a[r * 9:(r + 1) * 9, c * 4:(c + 1) * 4],
                                  a[(r + 1) * 9:(r + 2) * 9, (c + 1) * 4:(c + 2) * 4])
    # First block row spells P_3 .. P_8, 0, 0.
    assert np.array_equal(a[0:9, 0:4], EX1_SR[3])
    assert np.array_equal(a[0:9, 16:20], EX1_SR[7])
    assert not a[0:9, 24:].any()


def test_assemble_single_row_and_zero_family():
    p = derive(3, 4, 12)
    fam = build_rd(p)
    single_row = assemble_recovery_matrix(fam, burst_len=1)
    assert single_row.shape == (9, 9 * 4)
    empty = SubmatrixFamily(fam.link, 2, 5, 3, 2, {})
    assert assemble_recovery_matrix(empty).is_zero()


def test_claimed_profiles_example1():
    p = derive(3, 4, 12)
    sr = claimed_sr_profile(p)
    assert sr.deadlines == (7, 7, 7, 7, 6, 3, 3, 3, 3)
    assert dict(sr.combos) == {7: ((5, 1),), 8: ((5, 2),)}
    assert sr.a_dependent == frozenset({7, 8})
    assert 5 in sr.a_independent and 6 in sr.a_independent
    rd = claimed_rd_profile(p)
    assert rd.deadlines == (4, 5, 5, 5, 5, 9, 9, 9, 9)


def test_claimed_profiles_degenerate_cases():
    # q = 0: no q-segment and no combined symbols.
    sr = claimed_sr_profile(derive(3, 4, 11))
    assert sr.deadlines == (6, 6, 6, 6, 3, 3, 3, 3)
    assert not sr.combos
    # q >= b1: combined symbols vanish as well.
    sr22 = claimed_sr_profile(derive(3, 4, 22))
    assert sr22.deadlines[:7] == (15, 15, 15, 15, 12, 12, 12)
    assert not sr22.combos
    rd = claimed_rd_profile(derive(3, 4, 11))
    assert rd.deadlines == (4, 4, 4, 4, 8, 8, 8, 8)


def test_claimed_sr2_profile():
    # T - b1 = 7 = 1*4 + 3 for (3,4,10), so q = 3 leading entries.
    assert claimed_sr2_profile(derive(3, 4, 10)).deadlines == (6, 6, 6, 3, 3, 3, 3)
    assert claimed_sr2_profile(derive(2, 3, 7)).deadlines == (4, 4, 2, 2, 2)
    # q = 0: no leading segment.
    assert claimed_sr2_profile(derive(2, 3, 11)).deadlines == (6, 6, 6, 4, 4, 4, 2, 2, 2)


def test_pairwise_profile_sums_bounded_by_t():
    for p, reg in _valid_oriented_params(8, 64):
        rd = claimed_rd_profile(p).deadlines
        if reg.extended:
            sr = claimed_sr_profile(p).deadlines
            assert all(a + b <= p.T for a, b in zip(sr, rd)), (p.b1, p.b2, p.T)
        if reg.sr2:
            sr2 = claimed_sr2_profile(p).deadlines
            assert all(a + b <= p.T for a, b in zip(sr2, rd)), (p.b1, p.b2, p.T)


def test_combos_are_separable():
    for p, reg in _valid_oriented_params(8, 48):
        if not reg.extended:
            continue
        prof = claimed_sr_profile(p)
        band = range(p.b2 + p.q + 1, 2 * p.b2 + p.q + 1)
        for sym, terms in prof.combos.items():
            assert sym in band
            for d, lag in terms:
                assert d in prof.a_independent
                assert lag >= 1


def test_reduced_blocks_example1():
    p = derive(3, 4, 12)
    l4 = reduced_lemma4_block(p)
    assert np.array_equal(l4.array(), [[1, 0, 0], [0, 0, 1], [0, 1, 0]])
    assert l4.is_invertible()
    l6 = reduced_lemma6_block(p)
    assert l6.shape == (4, 4)
    assert l6.rank() == 4


def test_reduced_blocks_vacuous_cases():
    with pytest.raises(VacuousParameterError):
        reduced_lemma4_block(derive(3, 4, 11))  # q = 0
    with pytest.raises(VacuousParameterError):
        reduced_lemma6_block(derive(3, 4, 11))
    with pytest.raises(VacuousParameterError):
        reduced_lemma4_block(derive(3, 4, 22))  # q = 3 >= b1


def _is_permutation(a: np.ndarray) -> bool:
    return bool((a.sum(axis=0) == 1).all() and (a.sum(axis=1) == 1).all())


def test_permutation_structure_of_nonidentity_part():
    # Gather the right b-q columns of the reduced single-entry blocks; the
    # resulting grid must be a permutation matrix.
    for p, reg in _valid_oriented_params(8, 48):
        if not reg.extended or not 0 < p.q < p.b1:
            continue
        b1, b2, q = p.b1, p.b2, p.q
        sr = build_sr(p)
        grid = np.zeros(((b1 - q) * q, q * (b1 - q)), dtype=np.uint8)
        for r in range(1, b1 - q + 1):
            for c in range(1, q + 1):
                blk = sr.block(p.p * b1 - q - r + c).array()
                grid[(r - 1) * q:r * q, (c - 1) * (b1 - q):c * (b1 - q)] = \
                    blk[b2:b2 + q, q:b1]
        assert _is_permutation(grid), ("sr", p.b1, p.b2, p.T)
        rd = build_rd(p)
        grid2 = np.zeros(((b2 - q) * q, q * (b2 - q)), dtype=np.uint8)
        for r in range(1, b2 - q + 1):
            for c in range(1, q + 1):
                blk = rd.block(b2 - q - r + c).array()
                grid2[(r - 1) * q:r * q, (c - 1) * (b2 - q):c * (b2 - q)] = \
                    blk[:q, q:b2]
        assert _is_permutation(grid2), ("rd", p.b1, p.b2, p.T)


EX1_SR_DUMP = """\
family link=sr b=3 D=8 blocks=9x4
P[3]: I4 at row 6, col 1
P[4] (5,2)=1
P[5] (5,3)=1
P[6] (5,1)=1
P[7]: I4 at row 1, col 1"""


def test_family_dump_golden():
    assert family_dump(build_sr(derive(3, 4, 12))) == EX1_SR_DUMP
