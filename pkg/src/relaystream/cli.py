"""Command-line front end: inspect, simulate, verify, coverage.

Exit codes: 0 success, 1 check failure (or non-constructible triple on
inspect), 2 usage error.  RELAYSTREAM_SEED sets the default seed.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from . import channel, codec, report, verifier
from .codec import ConstructionUnavailable
from .constructions import family_dump, profile_dump
from .params import RegimeTag, classify, derive, optimal_rate


def _default_seed() -> int:
    return int(os.environ.get("RELAYSTREAM_SEED", verifier.DEFAULT_SEED))


def _not_constructible_message(b1: int, b2: int, T: int) -> str:
    reg = classify(b1, b2, T)
    if T < b1 + b2:
        return f"zero-rate regime: T={T} < b1+b2={b1 + b2}"
    if reg.tag is RegimeTag.INFEASIBLE:
        return ("infeasible region: 0 < T-u-v < v, no convolutional "
                "construction achieves the optimal rate")
    return ("no known construction: neither the extended-profile nor the "
            "two-block constraint holds")


def cmd_inspect(args) -> int:
    b1, b2, t = args.b1, args.b2, args.T
    reg = classify(b1, b2, t)
    print(f"triple ({b1}, {b2}, {t}): optimal rate {optimal_rate(b1, b2, t)}")
    flags = (f"extended={reg.extended} sr2={reg.sr2} "
             f"divisible={reg.divisible} infeasible={reg.infeasible}")
    print(f"regime: {reg.tag.value} ({flags})")
    if not reg.constructible:
        print(_not_constructible_message(b1, b2, t), file=sys.stderr)
        return 1
    p = derive(b1, b2, t)
    print(f"derived: u={p.u} v={p.v} p={p.p} q={p.q} "
          f"p'={p.p_prime} q'={p.q_prime} k={p.k} n={p.n}")
    prefer = "sr2" if args.link == "sr2" else None
    try:
        plan = codec.plan_code(b1, b2, t, prefer=prefer)
    except ConstructionUnavailable as exc:
        print(str(exc), file=sys.stderr)
        return 1
    print(f"scheme: {plan.scheme} (case {plan.case}"
          + (", mirrored orientation)" if plan.mirrored else ")"))
    links = {"sr": plan.sr, "sr2": plan.sr, "rd": plan.rd}
    selected = ["sr", "rd"] if args.link == "auto" else [args.link]
    for name in selected:
        link = links[name]
        print(f"[{'sr' if name == 'sr2' else name} link]")
        print(family_dump(link.family))
        print(profile_dump(link.profile))
    return 0


def cmd_simulate(args) -> int:
    b1, b2, t = args.b1, args.b2, args.T
    horizon = args.horizon if args.horizon else 4 * t
    try:
        sr_pat = channel.parse_burst_literal(args.sr_burst, horizon)
        rd_pat = channel.parse_burst_literal(args.rd_burst, horizon)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for name, pat, bound in (("sr", sr_pat, b1), ("rd", rd_pat, b2)):
        w = channel.violating_window(pat, bound, t)
        if w is not None:
            print(f"error: {name} pattern {pat} violates the burst bound "
                  f"{bound} in window [{w}, {w + t}]", file=sys.stderr)
            return 2
    try:
        trace = codec.simulate(b1, b2, t, sr_pat, rd_pat,
                               horizon=horizon, seed=args.seed)
    except (ConstructionUnavailable, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    header = ("slot", "link", "kind", "index", "value", "erased", "decoded_slot")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(trace.csv_rows())
        summary_fh = sys.stdout
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(trace.csv_rows())
        summary_fh = sys.stderr
    ok = trace.verified_ok()
    print(f"max_delay={trace.max_delay()} delay_budget={t} "
          f"decoded_ok={ok} failures={len(trace.failures)}", file=summary_fh)
    for f in trace.failures[:10]:
        print(f"failure: link={f.link} symbol={f.symbol} slot={f.slot}: {f.detail}",
              file=summary_fh)
    return 0 if ok else 1


def _parse_only(values: list[str]) -> list[tuple[int, int, int]]:
    out = []
    for v in values:
        parts = v.split(",")
        if len(parts) != 3:
            raise ValueError(f"--only expects b1,b2,T, got {v!r}")
        out.append(tuple(int(x) for x in parts))
    return out


def cmd_verify(args) -> int:
    try:
        only = _parse_only(args.only or [])
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if only:
        reports = [verifier.verify_triple(b1, b2, t, horizon=args.horizon,
                                          seed=args.seed,
                                          end_to_end=not args.skip_e2e)
                   for b1, b2, t in only]
    else:
        triples = verifier.DEFAULT_E2E_TRIPLES if not args.skip_e2e else ()
        reports = verifier.sweep_reports(b_max=args.bmax, t_max=args.tmax,
                                         e2e_triples=triples,
                                         horizon=args.horizon, seed=args.seed)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            report.write_report_csv(reports, fh)
        if not args.no_plot:
            report.render_report_figure(reports, str(Path(args.out).with_suffix(".png")))
    else:
        report.write_report_csv(reports, sys.stdout)
    total = sum(len(r.checks) for r in reports)
    failures = [(r, c) for r in reports for c in r.checks if not c.passed]
    print(f"checks={total} failed={len(failures)}", file=sys.stderr)
    for r, c in failures[:20]:
        print(f"FAIL ({r.b1},{r.b2},{r.T}) {c.name}: {c.witness}", file=sys.stderr)
    return 1 if failures else 0


def cmd_coverage(args) -> int:
    rows = verifier.coverage_scan(args.tmin, args.tmax, args.bmax)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            report.write_coverage_csv(rows, fh)
        if not args.no_plot:
            report.render_coverage_figure(rows, str(Path(args.out).with_suffix(".png")))
    else:
        report.write_coverage_csv(rows, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaystream",
        description="Streaming codes for three-node relay networks under "
                    "burst erasures: construction inspection, simulation, "
                    "batch verification, and coverage scans.")
    sub = parser.add_subparsers(dest="command", required=True)

    pi = sub.add_parser("inspect", help="print a construction and its profiles")
    pi.add_argument("b1", type=int)
    pi.add_argument("b2", type=int)
    pi.add_argument("T", type=int)
    pi.add_argument("--link", choices=("auto", "sr", "rd", "sr2"), default="auto")
    pi.set_defaults(func=cmd_inspect)

    ps = sub.add_parser("simulate", help="run one full pipeline trace")
    ps.add_argument("b1", type=int)
    ps.add_argument("b2", type=int)
    ps.add_argument("T", type=int)
    ps.add_argument("--sr-burst", default="none", metavar="START:LEN")
    ps.add_argument("--rd-burst", default="none", metavar="START:LEN")
    ps.add_argument("--horizon", type=int, default=0, metavar="N")
    ps.add_argument("--seed", type=int, default=_default_seed())
    ps.add_argument("--out", metavar="FILE")
    ps.set_defaults(func=cmd_simulate)

    pv = sub.add_parser("verify", help="run the verification suite")
    pv.add_argument("--only", action="append", metavar="B1,B2,T",
                    help="verify just this triple (repeatable)")
    pv.add_argument("--bmax", type=int, default=8)
    pv.add_argument("--tmax", type=int, default=64)
    pv.add_argument("--horizon", type=int, default=None)
    pv.add_argument("--seed", type=int, default=_default_seed())
    pv.add_argument("--skip-e2e", action="store_true",
                    help="skip the end-to-end alignment sweeps")
    pv.add_argument("--out", metavar="FILE")
    pv.add_argument("--no-plot", action="store_true")
    pv.set_defaults(func=cmd_verify)

    pc = sub.add_parser("coverage", help="count valid pairs per constraint")
    pc.add_argument("tmin", type=int)
    pc.add_argument("tmax", type=int)
    pc.add_argument("bmax", type=int)
    pc.add_argument("--out", metavar="FILE")
    pc.add_argument("--no-plot", action="store_true")
    pc.set_defaults(func=cmd_coverage)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
