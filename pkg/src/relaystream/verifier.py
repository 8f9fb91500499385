"""Batch verification: lemma checks, profile-oracle comparisons, exhaustive
end-to-end decoding sweeps, regime consistency, and coverage scans.

The end-to-end sweep checks every SR/RD single-burst alignment pair.  Per
burst class it extracts decode expressions once from the elimination
oracle, then applies them shifted for every pattern pair, comparing
decoded values against the raw source grid and recovery slots against the
delay budget.  A sample of pairs per triple is replayed through the
slot-by-slot reference decoder as a cross-check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import channel
from .channel import ErasurePattern
from .codec import (
    ConstructionUnavailable,
    DecodeExpression,
    LinkPlan,
    RelayPlan,
    burst_decode_expressions,
    destination_target_grid,
    encode,
    link_targets,
    oracle_recovery_times,
    plan_code,
    relay_grid_reference,
    simulate,
)
from .constructions import (
    ExtendedDelayProfile,
    SubmatrixFamily,
    reduced_lemma4_block,
    reduced_lemma6_block,
)
from .params import (
    CodeParams,
    classify,
    constraint_sr2,
    constraint_sr2_sufficient,
    derive,
    optimal_rate,
)

DEFAULT_SEED = 2024

# Curated case-split list for profile/end-to-end checks: the acceptance
# triples plus q=0, q=b1, q>b1, p=1, b1=b2, and the q'=b1 mirror.
DEFAULT_E2E_TRIPLES: tuple[tuple[int, int, int, Optional[str]], ...] = (
    (3, 4, 12, None),
    (4, 3, 12, None),
    (3, 4, 7, None),
    (3, 4, 11, None),
    (2, 3, 7, None),
    (2, 3, 10, None),
    (5, 3, 16, None),
    (3, 4, 22, None),
    (2, 4, 17, None),
    (3, 2, 11, None),
    (3, 3, 9, None),
    (2, 3, 11, "sr2"),
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: str = ""


@dataclass
class VerificationReport:
    b1: int
    b2: int
    T: int
    regime: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def verify_regime(b1: int, b2: int, T: int) -> CheckResult:
    """Predicate cross-consistency for one triple."""
    reg = classify(b1, b2, T)
    problems = []
    if reg.infeasible and (reg.extended or reg.sr2):
        problems.append("infeasible overlaps a construction predicate")
    if reg.divisible and not reg.extended:
        problems.append("divisible without extended")
    if optimal_rate(b1, b2, T) != optimal_rate(b2, b1, T):
        problems.append("rate not symmetric")
    if T >= b1 + b2:
        p = derive(b1, b2, T)
        if not (1 <= p.q_prime <= p.b1 and p.p_prime * p.b1 + p.q_prime == T - b2):
            problems.append("q' convention violated")
        if reg.constructible and p.rate != optimal_rate(b1, b2, T):
            problems.append("k/n differs from the optimal rate")
    return CheckResult("regime", not problems, "; ".join(problems))


def verify_lemma_invertibility(params: CodeParams) -> CheckResult:
    """Both reduced blocks invertible (oriented b1 <= b2 parameters)."""
    notes = []
    ok = True
    if params.q == 0:
        notes.append("skipped (q=0)")
    else:
        if params.q < params.b1:
            if not reduced_lemma4_block(params).is_invertible():
                ok = False
                notes.append("source-side reduced block singular")
        else:
            notes.append("source-side skipped (q >= b1)")
        if not reduced_lemma6_block(params).is_invertible():
            ok = False
            notes.append("relay-side reduced block singular")
    return CheckResult("invertibility", ok, "; ".join(notes))


def check_lemma10_rank(family: SubmatrixFamily, params: CodeParams) -> bool:
    """The lag-(T-b1) relay-side block must have full column rank."""
    blk = family.block(params.T - params.b1)
    return blk.rank() == family.block_cols


def verify_profiles(plan: RelayPlan) -> CheckResult:
    """Oracle recovery times never exceed the claimed deadlines.

    Also checks the positionwise pairing bound t_i + t'_i <= T and the
    separability of any extended profile (combination terms reference only
    pure symbols at strictly earlier slots, within the proven index band).
    """
    problems = []
    t = plan.params.T
    sr_d = plan.sr.profile.deadlines
    rd_d = plan.rd.profile.deadlines
    for i, (a, b) in enumerate(zip(sr_d, rd_d), start=1):
        if a + b > t:
            problems.append(f"profile sum {a}+{b} > T at symbol {i}")
            break
    for link_name, link in (("sr", plan.sr), ("rd", plan.rd)):
        prof = link.profile
        if isinstance(prof, ExtendedDelayProfile):
            o = plan.oriented
            band = range(o.b2 + o.q + 1, 2 * o.b2 + o.q + 1)
            for sym, terms in prof.combos.items():
                if sym not in band:
                    problems.append(f"{link_name}: combined symbol {sym} outside band")
                for d, lag in terms:
                    if d not in prof.a_independent or lag < 1:
                        problems.append(f"{link_name}: bad combination term ({d},{lag})")
        for burst in range(1, link.family.burst_len + 1):
            targets = link_targets(prof, burst)
            keys = list(targets)
            times = oracle_recovery_times(link.family, burst, [targets[k] for k in keys])
            for (delta, i), when in zip(keys, times):
                deadline = delta + prof.deadlines[i - 1]
                if when is None or when > deadline:
                    problems.append(
                        f"{link_name} burst {burst}: symbol {i} slot {delta} "
                        f"recovered at {when}, claimed {deadline}")
        if problems:
            break
    return CheckResult("profiles", not problems, "; ".join(problems[:3]))


def oracle_profile(link: LinkPlan, burst: Optional[int] = None) -> list[Optional[int]]:
    """Earliest recovery slots of the burst-start symbols (oracle side)."""
    b = link.family.burst_len if burst is None else burst
    targets = link_targets(link.profile, b)
    k = link.profile.k
    return oracle_recovery_times(link.family, b, [targets[(0, i)] for i in range(1, k + 1)])


@dataclass
class _LinkSolution:
    """Per burst length, decode expressions keyed (slot offset, symbol)."""

    exprs: dict[int, dict[tuple[int, int], Optional[DecodeExpression]]]
    lam: int


def _solve_link(link: LinkPlan) -> _LinkSolution:
    exprs = {}
    for burst in range(1, link.family.burst_len + 1):
        targets = link_targets(link.profile, burst)
        keys = list(targets)
        res = burst_decode_expressions(link.family, burst, [targets[k] for k in keys])
        exprs[burst] = dict(zip(keys, res))
    return _LinkSolution(exprs, link.max_lag)


@dataclass
class EndToEndStats:
    pairs: int = 0
    symbols_checked: int = 0
    cross_checked: int = 0


def verify_end_to_end(
    b1: int,
    b2: int,
    T: int,
    horizon: Optional[int] = None,
    seed: int = DEFAULT_SEED,
    prefer: Optional[str] = None,
    cross_check: int = 4,
) -> tuple[CheckResult, EndToEndStats]:
    """Every SR/RD single-burst alignment pair decodes all symbols in time.

    The RD burst start sweeps the window [sr_start - T, sr_start + 2T],
    which by time invariance covers every alignment class affecting one
    source packet; for the empty SR pattern the RD burst sweeps the whole
    horizon.
    """
    plan = plan_code(b1, b2, T, prefer=prefer)
    h = 4 * T if horizon is None else horizon
    if h < 2 * T:
        raise ValueError("horizon must be at least 2T")
    k = plan.params.k
    limit = h - T
    rng = np.random.default_rng(seed)
    source = rng.integers(0, 2, size=(h, k), dtype=np.uint8)
    x_packets = encode(source, plan.sr.family)
    relay_clean = relay_grid_reference(source, plan)
    sigma = _sigma_truth(source, plan)
    sr_sol = _solve_link(plan.sr)
    rd_sol = _solve_link(plan.rd)
    t_sr = plan.sr.profile.deadlines
    t_rd = plan.rd.profile.deadlines
    unwrap = plan.sr.combos if plan.case == 2 else {}

    stats = EndToEndStats()
    sample_every = None
    failure: Optional[str] = None
    cross_pairs: list[tuple[ErasurePattern, ErasurePattern]] = []

    sr_patterns = list(channel.enumerate_single_bursts(h, b1, T))
    for sr_pat in sr_patterns:
        sr_runs = sr_pat.runs()
        relay_fail = None
        if sr_runs:
            st, ln = sr_runs[0]
            relay_fail = _check_relay_zone(
                plan, sr_sol.exprs[ln], st, source, x_packets, sigma, h)
        if relay_fail:
            failure = f"sr={sr_pat} rd=- {relay_fail}"
            break
        z_packets = encode(relay_clean, plan.rd.family)
        target_truth = destination_target_grid(relay_clean, plan)

        base_fail, base_count = _check_baseline(source, target_truth, plan, limit)
        stats.pairs += 1
        stats.symbols_checked += base_count
        if base_fail:
            failure = f"sr={sr_pat} rd=- {base_fail}"
            break

        if sr_runs:
            lo = max(0, sr_runs[0][0] - T)
            hi = min(h, sr_runs[0][0] + 2 * T + 1)
        else:
            lo, hi = 0, h
        for ln2 in range(1, b2 + 1):
            sol2 = rd_sol.exprs[ln2]
            for st2 in range(lo, min(hi, h - ln2 + 1)):
                fail, count = _check_pair(
                    plan, sol2, st2, relay_clean, z_packets, target_truth,
                    source, limit, t_sr, t_rd, unwrap, h)
                stats.pairs += 1
                stats.symbols_checked += count
                if fail:
                    rd_pat = channel.single_burst(h, st2, ln2)
                    failure = f"sr={sr_pat} rd={rd_pat} {fail}"
                    break
            if failure:
                break
        if failure:
            break
        if sr_runs and cross_check and len(cross_pairs) < cross_check:
            st, ln = sr_runs[0]
            rd_start = min(max(0, st + T - 1), h - b2)
            cross_pairs.append((sr_pat, channel.single_burst(h, rd_start, b2)))

    # Replay a sample through the slot-by-slot reference decoder.
    if failure is None and cross_check:
        cross_pairs.append((channel.single_burst(h, 0, b1), channel.single_burst(h, 0, b2)))
        for sr_pat, rd_pat in cross_pairs[:cross_check + 1]:
            trace = simulate(b1, b2, T, sr_pat, rd_pat,
                             horizon=h, source=source, prefer=prefer)
            stats.cross_checked += 1
            if not trace.verified_ok():
                failure = f"reference decoder disagrees on sr={sr_pat} rd={rd_pat}"
                break
            if not np.array_equal(trace.relay.relay, relay_clean):
                failure = f"relay stream mismatch on sr={sr_pat} rd={rd_pat}"
                break

    name = "end_to_end"
    if failure:
        return CheckResult(name, False, failure), stats
    return CheckResult(name, True, f"{stats.pairs} pattern pairs"), stats


def _sigma_truth(source: np.ndarray, plan: RelayPlan) -> np.ndarray:
    """Per-link decode-target truth on the source side (sigma values)."""
    out = source.copy()
    prof = plan.sr.profile
    if isinstance(prof, ExtendedDelayProfile):
        for i, terms in prof.combos.items():
            for d, lag in terms:
                out[lag:, i - 1] ^= source[:-lag, d - 1]
    return out


def _check_relay_zone(plan, exprs, st, source, x_packets, sigma, h) -> Optional[str]:
    """Verify the relay's burst-zone targets: on time and value-exact."""
    k = plan.params.k
    t_sr = plan.sr.profile.deadlines
    for (delta, i), entry in exprs.items():
        tau = st + delta
        emit = tau + t_sr[i - 1]
        if tau >= h or emit >= h:
            continue
        if entry is None:
            return f"relay target s{i}[{tau}] unexpressible"
        avail = st + entry.avail
        if avail > emit:
            return f"relay target s{i}[{tau}] available at {avail} > {emit}"
        val = 0
        for ds, sym in entry.sym_refs:
            s2 = st + ds
            if s2 >= 0:
                val ^= int(source[s2, sym - 1])
        for dp, c in entry.par_refs:
            s2 = st + dp
            if s2 >= 0:
                val ^= int(x_packets[s2, k + c])
        if val != int(sigma[tau, i - 1]):
            return f"relay value mismatch for s{i}[{tau}]"
    return None


def _check_baseline(source, target_truth, plan, limit) -> tuple[Optional[str], int]:
    """No-RD-burst decode: systematic arrivals plus combination unwrap."""
    k = plan.params.k
    t_sr = plan.sr.profile.deadlines
    T = plan.params.T
    dec = np.zeros((limit, k), dtype=np.uint8)
    tm = np.zeros((limit, k), dtype=np.int64)
    for i in range(1, k + 1):
        lag_i = t_sr[i - 1]
        dec[:, i - 1] = target_truth[lag_i:lag_i + limit, i - 1]
        tm[:, i - 1] = np.arange(limit) + lag_i
    if plan.case == 2:
        for i, terms in plan.sr.combos.items():
            for d, lag in terms:
                dec[lag:, i - 1] ^= dec[:-lag, d - 1]
                tm[lag:, i - 1] = np.maximum(tm[lag:, i - 1], tm[:-lag, d - 1])
    if not np.array_equal(dec, source[:limit]):
        bad = np.argwhere(dec != source[:limit])[0]
        return f"baseline value mismatch at s{bad[1] + 1}[{bad[0]}]", limit * k
    late = tm - np.arange(limit)[:, None] - T
    if (late > 0).any():
        bad = np.argwhere(late > 0)[0]
        return f"baseline deadline missed at s{bad[1] + 1}[{bad[0]}]", limit * k
    return None, limit * k


def _check_pair(plan, sol2, st2, relay, z_packets, target_truth,
                source, limit, t_sr, t_rd, unwrap, h) -> tuple[Optional[str], int]:
    """Re-verify the symbols whose decode path crosses the RD burst zone."""
    k = plan.params.k
    T = plan.params.T
    patched: dict[tuple[int, int], tuple[int, int]] = {}
    for (delta, i), entry in sol2.items():
        t2 = st2 + delta
        if t2 >= h:
            continue
        deadline = t2 + t_rd[i - 1]
        if deadline >= h:
            continue  # only feeds unverifiable tail symbols
        if entry is None:
            return f"relay symbol {i} at slot {t2} unexpressible", 0
        avail = st2 + entry.avail
        if avail > deadline:
            return f"relay symbol {i} at slot {t2} recovered at {avail} > {deadline}", 0
        val = 0
        for ds, sym in entry.sym_refs:
            s2 = st2 + ds
            if s2 >= 0:
                val ^= int(relay[s2, sym - 1])
        for dp, c in entry.par_refs:
            s2 = st2 + dp
            if s2 >= 0:
                val ^= int(z_packets[s2, k + c])
        if val != int(target_truth[t2, i - 1]):
            return f"destination value mismatch for relay symbol {i} at {t2}", 0
        patched[(t2, i)] = (val, avail)

    def r_get(t2, i):
        hit = patched.get((t2, i))
        if hit is not None:
            return hit
        return int(target_truth[t2, i - 1]), t2

    affected: set[tuple[int, int]] = set()
    for (delta, i) in sol2:
        t2 = st2 + delta
        tau = t2 - t_sr[i - 1]
        if 0 <= tau < limit:
            affected.add((tau, i))
    for i, terms in unwrap.items():
        for d, lag in terms:
            for (delta, dd) in sol2:
                if dd != d:
                    continue
                tau = st2 + delta - t_sr[d - 1] + lag
                if 0 <= tau < limit:
                    affected.add((tau, i))

    for tau, i in affected:
        t2 = tau + t_sr[i - 1]
        val, when = r_get(t2, i)
        for d, lag in unwrap.get(i, ()):
            st_src = tau - lag
            if st_src < 0:
                continue
            vd, td = r_get(st_src + t_sr[d - 1], d)
            val ^= vd
            when = max(when, td)
        if val != int(source[tau, i - 1]):
            return f"decoded s{i}[{tau}] wrong", len(affected)
        if when > tau + T:
            return f"s{i}[{tau}] decoded at {when} > {tau + T}", len(affected)
    return None, len(affected)


def verify_lemma8(b_max: int = 8, t_max: int = 64) -> CheckResult:
    """Sufficient-condition implication: T-bound predicate implies sr2."""
    checked = 0
    for bb1, bb2 in itertools.product(range(1, b_max + 1), repeat=2):
        if bb1 == bb2:
            continue
        for tt in range(bb1 + bb2, t_max + 1):
            p = derive(bb1, bb2, tt)
            if constraint_sr2_sufficient(p):
                checked += 1
                if not constraint_sr2(p):
                    return CheckResult(
                        "lemma8", False, f"counterexample ({bb1},{bb2},{tt})")
    return CheckResult("lemma8", True, f"{checked} implications checked")


@dataclass
class CoverageRow:
    T: int
    total: int = 0
    divisible: int = 0
    extended: int = 0
    sr2: int = 0
    sr2_sufficient: int = 0
    infeasible: int = 0


def coverage_scan(t_min: int, t_max: int, b_max: int) -> list[CoverageRow]:
    """Per-T counts of (b1, b2) pairs satisfying each predicate."""
    rows = []
    for tt in range(t_min, t_max + 1):
        row = CoverageRow(T=tt)
        for bb1, bb2 in itertools.product(range(1, b_max + 1), repeat=2):
            if bb1 + bb2 > tt:
                continue
            row.total += 1
            reg = classify(bb1, bb2, tt)
            row.divisible += reg.divisible
            row.extended += reg.extended
            row.sr2 += reg.sr2
            row.infeasible += reg.infeasible
            if bb1 != bb2 and constraint_sr2_sufficient(derive(bb1, bb2, tt)):
                row.sr2_sufficient += 1
        rows.append(row)
    return rows


def verify_triple(
    b1: int,
    b2: int,
    T: int,
    horizon: Optional[int] = None,
    seed: int = DEFAULT_SEED,
    prefer: Optional[str] = None,
    end_to_end: bool = True,
) -> VerificationReport:
    """All per-triple checks; non-constructible triples get regime-only rows."""
    reg = classify(b1, b2, T)
    report = VerificationReport(b1, b2, T, reg.tag.value)
    report.checks.append(verify_regime(b1, b2, T))
    if not reg.constructible:
        report.checks.append(CheckResult(
            "construction", True,
            f"not applicable (regime {reg.tag.value}); no construction attempted"))
        return report
    plan = plan_code(b1, b2, T, prefer=prefer)
    report.regime = f"{reg.tag.value}:{plan.scheme}" if prefer else reg.tag.value
    report.checks.append(verify_lemma_invertibility(plan.oriented))
    report.checks.append(verify_profiles(plan))
    if end_to_end:
        check, _ = verify_end_to_end(b1, b2, T, horizon=horizon, seed=seed, prefer=prefer)
        report.checks.append(check)
    rd_family = plan.sr.family if plan.mirrored else plan.rd.family
    ok10 = check_lemma10_rank(rd_family, plan.oriented)
    report.checks.append(CheckResult("lemma10", ok10,
                                     "" if ok10 else "terminal block rank deficient"))
    return report


def sweep_reports(
    b_max: int = 8,
    t_max: int = 64,
    e2e_triples: Sequence[tuple] = DEFAULT_E2E_TRIPLES,
    horizon: Optional[int] = None,
    seed: int = DEFAULT_SEED,
) -> list[VerificationReport]:
    """Default verify run: cheap checks over the full sweep, deep checks on
    the curated triples, plus the global implication check."""
    reports: list[VerificationReport] = []
    glob = VerificationReport(0, 0, 0, "sweep")
    glob.checks.append(verify_lemma8(b_max, t_max))
    rows = coverage_scan(2, t_max, min(b_max, 5))
    dom = all(r.divisible <= r.extended for r in rows)
    glob.checks.append(CheckResult(
        "coverage_dominance", dom,
        "" if dom else "divisible count exceeds extended somewhere"))
    reports.append(glob)

    deep = {(t[0], t[1], t[2]) for t in e2e_triples}
    for bb1 in range(1, b_max + 1):
        for bb2 in range(1, b_max + 1):
            for tt in range(bb1 + bb2, t_max + 1):
                reg = classify(bb1, bb2, tt)
                rep = VerificationReport(bb1, bb2, tt, reg.tag.value)
                rep.checks.append(verify_regime(bb1, bb2, tt))
                if bb1 <= bb2 and reg.constructible:
                    p = derive(bb1, bb2, tt)
                    rep.checks.append(verify_lemma_invertibility(p))
                    if reg.extended or (bb1, bb2, tt) in deep:
                        fam = None
                        try:
                            fam = plan_code(bb1, bb2, tt).rd.family \
                                if bb1 <= bb2 else None
                        except ConstructionUnavailable:
                            pass
                        if fam is not None:
                            ok10 = check_lemma10_rank(fam, p)
                            rep.checks.append(CheckResult(
                                "lemma10", ok10,
                                "" if ok10 else "terminal block rank deficient"))
                reports.append(rep)
    for entry in e2e_triples:
        bb1, bb2, tt, prefer = entry
        reports.append(verify_triple(bb1, bb2, tt, horizon=horizon, seed=seed,
                                     prefer=prefer))
    reports.sort(key=lambda r: (r.b1, r.b2, r.T))
    return reports
