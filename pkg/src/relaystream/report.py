"""Delimited report output plus matplotlib renderings of the same data.

CSV is the primary, byte-reproducible artifact; the figures are rendered
next to it for quick visual inspection.  matplotlib is imported lazily so
library use never requires a plotting backend.
"""

from __future__ import annotations

import csv
from typing import IO, Sequence

from .verifier import CoverageRow, VerificationReport

COVERAGE_FIELDS = ("T", "total", "divisible", "extended", "sr2",
                   "sr2_sufficient", "infeasible")
REPORT_FIELDS = ("b1", "b2", "T", "regime", "check", "pass", "witness")


def write_coverage_csv(rows: Sequence[CoverageRow], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COVERAGE_FIELDS)
    for r in rows:
        w.writerow([r.T, r.total, r.divisible, r.extended, r.sr2,
                    r.sr2_sufficient, r.infeasible])


def write_report_csv(reports: Sequence[VerificationReport], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(REPORT_FIELDS)
    for rep in reports:
        for c in rep.checks:
            w.writerow([rep.b1, rep.b2, rep.T, rep.regime, c.name,
                        int(c.passed), c.witness])


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def render_coverage_figure(rows: Sequence[CoverageRow], path: str) -> None:
    """Valid-pair counts per T for each constraint, Fig.-1 style."""
    plt = _pyplot()
    ts = [r.T for r in rows]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(ts, [r.total for r in rows], "k--", label="all pairs")
    ax.plot(ts, [r.extended for r in rows], "o-", ms=3,
            label="extended-profile constraint")
    ax.plot(ts, [r.sr2 for r in rows], "s-", ms=3,
            label="two-block constraint")
    ax.plot(ts, [r.sr2_sufficient for r in rows], ":",
            label="two-block sufficient bound")
    ax.plot(ts, [r.divisible for r in rows], "^-", ms=3,
            label="divisibility constraint")
    ax.set_xlabel("delay budget T")
    ax.set_ylabel("valid (b1, b2) pairs")
    ax.legend(loc="lower right", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_report_figure(reports: Sequence[VerificationReport], path: str) -> None:
    """Pass/fail counts per check name."""
    plt = _pyplot()
    counts: dict[str, list[int]] = {}
    for rep in reports:
        for c in rep.checks:
            counts.setdefault(c.name, [0, 0])[0 if c.passed else 1] += 1
    names = sorted(counts)
    passed = [counts[n][0] for n in names]
    failed = [counts[n][1] for n in names]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    xs = range(len(names))
    ax.bar(xs, passed, color="tab:green", label="pass")
    ax.bar(xs, failed, bottom=passed, color="tab:red", label="fail")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(names, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("checks")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
