"""End-to-end pipeline: systematic encoding, relay mapping, destination
decoding, and the independent recovery-time oracle.

The decoders never assume the claimed delay profiles: both the relay and
the destination feed every received packet's equations into an
incremental GF(2) eliminator and ask when each needed combination enters
the span.  The oracle (`oracle_recovery_times`) runs the same elimination
against a canonical burst with pre-time-0 symbols seeded as known
variables, which is what the delay-profile verification compares against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import channel
from .channel import ErasurePattern, ReceivedStream
from .constructions import (
    DelayProfile,
    ExtendedDelayProfile,
    SubmatrixFamily,
    build_rd,
    build_sr,
    build_sr2,
    claimed_rd_profile,
    claimed_sr2_profile,
    claimed_sr_profile,
)
from .gf2 import IncrementalEliminator
from .params import CodeParams, Regime, classify, derive


Terms = tuple[tuple[int, int], ...]  # ((slot, symbol-1-based), ...)


class ConstructionUnavailable(ValueError):
    """No construction applies to this triple (infeasible or unknown regime)."""

    def __init__(self, b1: int, b2: int, T: int, regime: Regime):
        self.regime = regime
        super().__init__(
            f"no construction for ({b1}, {b2}, {T}): regime is {regime.tag.value}"
        )


@dataclass(frozen=True)
class DecodeFailure:
    """A needed combination was not recoverable where the pipeline required it."""

    link: str
    symbol: int
    slot: int
    detail: str


@dataclass(frozen=True)
class LinkPlan:
    family: SubmatrixFamily
    profile: DelayProfile | ExtendedDelayProfile

    @property
    def combos(self) -> Mapping[int, Terms]:
        if isinstance(self.profile, ExtendedDelayProfile):
            return self.profile.combos
        return {}

    @property
    def max_lag(self) -> int:
        if isinstance(self.profile, ExtendedDelayProfile):
            return self.profile.max_lag
        return 0


@dataclass(frozen=True)
class RelayPlan:
    """Complete construction choice for one (b1, b2, T) triple.

    ``case`` follows the profile placement: 1 = plain profiles on both
    links, 2 = extended profile on the source side, 3 = extended profile
    on the relay side (mirrored orientation).
    """

    params: CodeParams
    oriented: CodeParams
    regime: Regime
    scheme: str
    case: int
    mirrored: bool
    sr: LinkPlan
    rd: LinkPlan


def plan_code(b1: int, b2: int, T: int, prefer: Optional[str] = None) -> RelayPlan:
    """Pick a construction for the triple; `prefer` forces extended or sr2."""
    regime = classify(b1, b2, T)
    available = []
    if regime.extended:
        available.append("extended")
    if regime.sr2:
        available.append("sr2")
    if prefer is not None:
        if prefer not in ("extended", "sr2"):
            raise ValueError(f"unknown scheme {prefer!r}")
        if prefer not in available:
            raise ConstructionUnavailable(b1, b2, T, regime)
        scheme = prefer
    elif available:
        scheme = available[0]
    else:
        raise ConstructionUnavailable(b1, b2, T, regime)

    params = derive(b1, b2, T)
    mirrored = b1 > b2
    oriented = params.mirrored() if mirrored else params
    rd_link = LinkPlan(build_rd(oriented), claimed_rd_profile(oriented))
    if scheme == "extended":
        ext_link = LinkPlan(build_sr(oriented), claimed_sr_profile(oriented))
    else:
        ext_link = LinkPlan(build_sr2(oriented), claimed_sr2_profile(oriented))

    if not mirrored:
        sr, rd = ext_link, rd_link
        case = 2 if sr.combos else 1
    else:
        # Swap roles: the relay-side code of the mirrored triple serves the
        # source link, and vice versa.
        sr, rd = rd_link, ext_link
        case = 3 if rd.combos else 1
    return RelayPlan(
        params=params, oriented=oriented, regime=regime, scheme=scheme,
        case=case, mirrored=mirrored, sr=sr, rd=rd,
    )


def encode(source: np.ndarray, family: SubmatrixFamily) -> np.ndarray:
    """Systematic packets X[t] = (S[t], P[t]) with the block convolution parity."""
    src = np.asarray(source, dtype=np.uint8)
    if src.ndim != 2 or src.shape[1] != family.block_rows:
        raise ValueError(
            f"source shape {src.shape} does not match k={family.block_rows}"
        )
    h = src.shape[0]
    par = np.zeros((h, family.block_cols), dtype=np.uint8)
    wide = src.astype(np.uint32)
    for i, blk in family.blocks.items():
        if i >= h:
            continue
        prod = (wide[: h - i] @ blk.array().astype(np.uint32)) & 1
        par[i:] ^= prod.astype(np.uint8)
    return np.concatenate([src, par], axis=1)


class LinkDecoder:
    """Slot-by-slot GF(2) decoder for one link over a finite horizon.

    Symbols before slot 0 are known zeros, so their terms drop out of
    every equation and target.
    """

    def __init__(self, family: SubmatrixFamily, horizon: int):
        self.family = family
        self.horizon = horizon
        self.k = family.block_rows
        self.u = family.block_cols
        self.elim = IncrementalEliminator(horizon * self.k)
        self._next_slot = 0
        # Per parity coordinate: (lag, row indices with a 1 in that column).
        self._col_support: list[list[tuple[int, tuple[int, ...]]]] = []
        for c in range(self.u):
            sup = []
            for i in sorted(family.blocks):
                rows = tuple(int(r) for r in np.nonzero(family.blocks[i].array()[:, c])[0])
                if rows:
                    sup.append((i, rows))
            self._col_support.append(sup)

    def _coord(self, slot: int, sym: int) -> int:
        return slot * self.k + sym - 1

    def feed(self, slot: int, packet: Optional[np.ndarray]) -> None:
        if slot != self._next_slot:
            raise ValueError(f"slots must be fed in order, expected {self._next_slot}")
        self._next_slot += 1
        if packet is None:
            return
        k = self.k
        for j in range(k):
            self.elim.add(1 << self._coord(slot, j + 1), slot, int(packet[j]))
        for c in range(self.u):
            bits = 0
            for lag, rows in self._col_support[c]:
                s = slot - lag
                if s < 0:
                    continue
                base = s * k
                for r in rows:
                    bits ^= 1 << (base + r)
            self.elim.add(bits, slot, int(packet[k + c]))

    def feed_stream(self, stream: ReceivedStream) -> None:
        for slot in range(stream.horizon):
            self.feed(slot, stream.packet(slot))

    def express_target(self, terms: Terms) -> Optional[tuple[int, int]]:
        """(earliest slot, value) of a symbol combination, or None.

        Terms at negative slots are dropped (known zeros); duplicate terms
        cancel over GF(2).
        """
        bits = 0
        for slot, sym in terms:
            if slot < 0:
                continue
            if slot >= self.horizon or not 1 <= sym <= self.k:
                raise ValueError(f"term ({slot}, {sym}) outside the decoder domain")
            bits ^= 1 << self._coord(slot, sym)
        if bits == 0:
            return 0, 0
        hit = self.elim.express(bits)
        if hit is None:
            return None
        return max(hit.tag, 0), hit.value


@dataclass(frozen=True)
class DecodeExpression:
    """How one target is computed from a canonical-burst window.

    Slots are relative to the burst start; applying at burst position s
    means XORing message symbols at (s + slot, sym) and parity coordinates
    at packet (s + slot), entry k + coord.
    """

    avail: int
    sym_refs: tuple[tuple[int, int], ...]
    par_refs: tuple[tuple[int, int], ...]


def _burst_elimination(
    family: SubmatrixFamily,
    burst_len: int,
    targets: Sequence[Terms],
    eff_delay: Optional[int],
    want_refs: bool,
):
    d = family.eff_delay if eff_delay is None else eff_delay
    b = burst_len
    k, u = family.block_rows, family.block_cols
    lo = b - d
    for terms in targets:
        for slot, _ in terms:
            lo = min(lo, slot)
    hi = b + d
    elim = IncrementalEliminator((hi - lo) * k)
    sources: list[tuple] = []

    def coord(slot, sym):
        return (slot - lo) * k + sym - 1

    def add(bits, tag, kind):
        payload = 0
        if want_refs:
            payload = 1 << len(sources)
            sources.append(kind)
        elim.add(bits, tag, 0, payload)

    # Pre-burst symbols are known (recovered before the burst's window).
    for s in range(lo, 0):
        for j in range(1, k + 1):
            add(1 << coord(s, j), s, ("sym", s, j))
    for t in range(b, hi):
        for j in range(1, k + 1):
            add(1 << coord(t, j), t, ("sym", t, j))
        for c in range(u):
            bits = 0
            for i in sorted(family.blocks):
                s = t - i
                if s < lo:
                    continue
                col = family.blocks[i].array()[:, c]
                base = coord(s, 1)
                for r in np.nonzero(col)[0]:
                    bits ^= 1 << (base + int(r))
            add(bits, t, ("par", t, c))

    out = []
    for terms in targets:
        bits = 0
        for slot, sym in terms:
            if not lo <= slot < hi:
                raise ValueError(f"target term ({slot}, {sym}) outside oracle window")
            bits ^= 1 << coord(slot, sym)
        if bits == 0:
            out.append(DecodeExpression(0, (), ()) if want_refs else 0)
            continue
        hit = elim.express(bits)
        if hit is None:
            out.append(None)
        elif not want_refs:
            out.append(hit.tag)
        else:
            sym_refs, par_refs = [], []
            mask = hit.payload
            while mask:
                idx = (mask & -mask).bit_length() - 1
                mask &= mask - 1
                kind = sources[idx]
                if kind[0] == "sym":
                    sym_refs.append((kind[1], kind[2]))
                else:
                    par_refs.append((kind[1], kind[2]))
            out.append(DecodeExpression(hit.tag, tuple(sym_refs), tuple(par_refs)))
    return out


def oracle_recovery_times(
    family: SubmatrixFamily,
    burst_len: int,
    targets: Sequence[Terms],
    eff_delay: Optional[int] = None,
) -> list[Optional[int]]:
    """Earliest slot each target enters the span after a burst at [0, burst_len).

    Independent of the claimed profiles: the eliminator sees the systematic
    equations of every received slot, the parity equations of the recovery
    window, and seed equations for all pre-time-0 symbols (known variables,
    not exploited zeros).
    """
    return _burst_elimination(family, burst_len, targets, eff_delay, want_refs=False)


def burst_decode_expressions(
    family: SubmatrixFamily,
    burst_len: int,
    targets: Sequence[Terms],
    eff_delay: Optional[int] = None,
) -> list[Optional[DecodeExpression]]:
    """Same elimination as the oracle, but returning full provenance."""
    return _burst_elimination(family, burst_len, targets, eff_delay, want_refs=True)


def link_targets(
    profile: DelayProfile | ExtendedDelayProfile, burst_len: int
) -> dict[tuple[int, int], Terms]:
    """Decode targets a burst at [0, burst_len) obligates, keyed (slot, symbol).

    Covers the erased slots plus the trailing slots whose combination terms
    reach back into the burst.
    """
    combos = profile.combos if isinstance(profile, ExtendedDelayProfile) else {}
    max_lag = profile.max_lag if isinstance(profile, ExtendedDelayProfile) else 0
    out: dict[tuple[int, int], Terms] = {}
    for delta in range(burst_len + max_lag):
        for i in range(1, profile.k + 1):
            terms: Terms = ((delta, i),)
            terms += tuple((delta - lag, d) for d, lag in combos.get(i, ()))
            out[(delta, i)] = terms
    return out


@dataclass
class RelayOutcome:
    relay: np.ndarray          # H x k relay stream values
    avail: np.ndarray          # slot each needed combination became expressible
    failures: list[DecodeFailure]


def relay_map(received: ReceivedStream, plan: RelayPlan) -> RelayOutcome:
    """Decode the source link and form the relay stream R[t].

    r_i[t] carries the (possibly combined) symbol recovered with lag t_i;
    in the mirrored-extended case the relay additionally folds in its own
    earlier outputs so the destination's combination telescopes.
    """
    h = received.horizon
    k = plan.params.k
    dec = LinkDecoder(plan.sr.family, h)
    dec.feed_stream(received)
    lags = plan.sr.profile.deadlines
    sr_combos = plan.sr.combos
    rd_combos = plan.rd.combos if plan.case == 3 else {}
    relay = np.zeros((h, k), dtype=np.uint8)
    avail = np.full((h, k), -1, dtype=np.int64)
    failures: list[DecodeFailure] = []
    for t in range(h):
        for i in range(1, k + 1):
            tau = t - lags[i - 1]
            terms: Terms = ((tau, i),)
            terms += tuple((tau - lag, d) for d, lag in sr_combos.get(i, ()))
            res = dec.express_target(terms)
            if res is None:
                failures.append(DecodeFailure(
                    "sr", i, t, f"combination for symbol {i} at source slot {tau} "
                    "never entered the span"))
                val, when = 0, -1
            else:
                when, val = res
                if when > t:
                    failures.append(DecodeFailure(
                        "sr", i, t, f"symbol {i} at source slot {tau} available "
                        f"only at {when}, needed by {t}"))
            for d, lag in rd_combos.get(i, ()):
                if t - lag >= 0:
                    val ^= int(relay[t - lag, d - 1])
            relay[t, i - 1] = val
            avail[t, i - 1] = when
    return RelayOutcome(relay=relay, avail=avail, failures=failures)


@dataclass
class DestinationOutcome:
    decoded: np.ndarray        # H x k reconstructed source symbols
    decoded_times: np.ndarray  # slot of recovery; -1 where the horizon ran out
    r_values: np.ndarray
    r_times: np.ndarray
    failures: list[DecodeFailure]


def destination_decode(received: ReceivedStream, plan: RelayPlan) -> DestinationOutcome:
    """Recover the relay stream from the relay link, then unwrap to sources."""
    h = received.horizon
    k = plan.params.k
    dec = LinkDecoder(plan.rd.family, h)
    dec.feed_stream(received)
    rd_combos = plan.rd.combos if plan.case == 3 else {}
    sr_combos = plan.sr.combos if plan.case == 2 else {}
    lags = plan.sr.profile.deadlines
    failures: list[DecodeFailure] = []

    r_values = np.zeros((h, k), dtype=np.uint8)
    r_times = np.full((h, k), -1, dtype=np.int64)
    for t in range(h):
        for i in range(1, k + 1):
            terms: Terms = ((t, i),)
            terms += tuple((t - lag, d) for d, lag in rd_combos.get(i, ()))
            res = dec.express_target(terms)
            if res is not None:
                r_times[t, i - 1], r_values[t, i - 1] = res

    decoded = np.zeros((h, k), dtype=np.uint8)
    times = np.full((h, k), -1, dtype=np.int64)
    # Source slots past this limit have decode windows spilling past the
    # horizon; missing values there are unverifiable tails, not failures.
    limit = max(0, h - plan.params.T)
    for tau in range(h):
        for i in range(1, k + 1):
            t2 = tau + lags[i - 1]
            if t2 >= h:
                continue
            if r_times[t2, i - 1] < 0:
                if tau < limit:
                    failures.append(DecodeFailure(
                        "rd", i, t2, f"relay symbol {i} at slot {t2} never entered the span"))
                continue
            val = int(r_values[t2, i - 1])
            when = int(r_times[t2, i - 1])
            broken = False
            for d, lag in sr_combos.get(i, ()):
                st = tau - lag
                if st < 0:
                    continue  # pre-horizon component is a known zero
                if times[st, d - 1] < 0:
                    if tau < limit:
                        failures.append(DecodeFailure(
                            "rd", i, t2, f"combination component s{d}[{st}] undecoded"))
                    broken = True
                    break
                val ^= int(decoded[st, d - 1])
                when = max(when, int(times[st, d - 1]))
            if broken:
                continue
            decoded[tau, i - 1] = val
            times[tau, i - 1] = when
    return DestinationOutcome(decoded, times, r_values, r_times, failures)


def sigma_grid(source: np.ndarray, profile) -> np.ndarray:
    """Extended-symbol values sigma_i[t] = s_i[t] + combination terms."""
    out = source.copy()
    if isinstance(profile, ExtendedDelayProfile):
        for i, terms in profile.combos.items():
            for d, lag in terms:
                out[lag:, i - 1] ^= source[:-lag, d - 1]
    return out


def relay_grid_reference(source: np.ndarray, plan: RelayPlan) -> np.ndarray:
    """Relay output a failure-free relay must emit (value-level oracle)."""
    h = source.shape[0]
    k = plan.params.k
    sig = sigma_grid(source, plan.sr.profile)
    relay = np.zeros((h, k), dtype=np.uint8)
    for i in range(1, k + 1):
        lag_i = plan.sr.profile.deadlines[i - 1]
        if lag_i < h:
            relay[lag_i:, i - 1] = sig[: h - lag_i, i - 1]
    if plan.case == 3:
        for i, terms in plan.rd.combos.items():
            for d, lag in terms:
                relay[lag:, i - 1] ^= relay[:-lag, d - 1]
    return relay


def destination_target_grid(relay: np.ndarray, plan: RelayPlan) -> np.ndarray:
    """Values of the destination's per-(slot, symbol) decode targets."""
    out = relay.copy()
    if plan.case == 3:
        for i, terms in plan.rd.combos.items():
            for d, lag in terms:
                out[lag:, i - 1] ^= relay[:-lag, d - 1]
    return out


@dataclass
class TransmissionTrace:
    """Time-indexed record of one full pipeline run."""

    plan: RelayPlan
    horizon: int
    source: np.ndarray
    x_packets: np.ndarray
    sr_received: ReceivedStream
    relay: RelayOutcome
    z_packets: np.ndarray
    rd_received: ReceivedStream
    destination: DestinationOutcome

    @property
    def failures(self) -> list[DecodeFailure]:
        return self.relay.failures + self.destination.failures

    @property
    def check_limit(self) -> int:
        """Source slots with a complete decode window inside the horizon."""
        return max(0, self.horizon - self.plan.params.T)

    def max_delay(self) -> int:
        lim = self.check_limit
        times = self.destination.decoded_times[:lim]
        if times.size == 0 or times.max() < 0:
            return 0
        taus = np.arange(lim)[:, None]
        return int((times - taus)[times >= 0].max())

    def verified_ok(self) -> bool:
        """All checkable symbols decoded, correct, and within delay T."""
        if self.failures:
            return False
        lim = self.check_limit
        times = self.destination.decoded_times[:lim]
        if (times < 0).any():
            return False
        taus = np.arange(lim)[:, None]
        if (times > taus + self.plan.params.T).any():
            return False
        return bool(np.array_equal(self.destination.decoded[:lim], self.source[:lim]))

    def csv_rows(self):
        """Rows of (slot, link, kind, index, value, erased, decoded_slot)."""
        k, n = self.plan.params.k, self.plan.params.n
        for t in range(self.horizon):
            for i in range(k):
                yield (t, "src", "message", i + 1, int(self.source[t, i]), "", "")
            for i in range(n):
                er = int(not self.sr_received.received[t])
                yield (t, "sr", "packet", i + 1, int(self.x_packets[t, i]), er, "")
            for i in range(k):
                yield (t, "relay", "symbol", i + 1, int(self.relay.relay[t, i]), "",
                       int(self.relay.avail[t, i]))
            for i in range(n):
                er = int(not self.rd_received.received[t])
                yield (t, "rd", "packet", i + 1, int(self.z_packets[t, i]), er, "")
            for i in range(k):
                yield (t, "dst", "decoded", i + 1,
                       int(self.destination.decoded[t, i]), "",
                       int(self.destination.decoded_times[t, i]))


def simulate(
    b1: int,
    b2: int,
    T: int,
    sr_pattern: ErasurePattern,
    rd_pattern: ErasurePattern,
    horizon: Optional[int] = None,
    seed: int = 0,
    source: Optional[np.ndarray] = None,
    prefer: Optional[str] = None,
) -> TransmissionTrace:
    """Run the full honest pipeline on pseudorandom (or given) source data."""
    plan = plan_code(b1, b2, T, prefer=prefer)
    h = 4 * T if horizon is None else horizon
    if sr_pattern.horizon != h or rd_pattern.horizon != h:
        raise ValueError("pattern horizons must match the simulation horizon")
    for name, pat, bound in (("sr", sr_pattern, b1), ("rd", rd_pattern, b2)):
        w = channel.violating_window(pat, bound, T)
        if w is not None:
            raise ValueError(
                f"{name} pattern violates the single-burst bound {bound} in the "
                f"window [{w}, {w + T}]"
            )
    if source is None:
        rng = np.random.default_rng(seed)
        source = rng.integers(0, 2, size=(h, plan.params.k), dtype=np.uint8)
    else:
        source = np.asarray(source, dtype=np.uint8)
        if source.shape != (h, plan.params.k):
            raise ValueError(f"source shape {source.shape} != ({h}, {plan.params.k})")

    x = encode(source, plan.sr.family)
    sr_recv = channel.apply(x, sr_pattern)
    relay = relay_map(sr_recv, plan)
    z = encode(relay.relay, plan.rd.family)
    rd_recv = channel.apply(z, rd_pattern)
    dest = destination_decode(rd_recv, plan)
    return TransmissionTrace(
        plan=plan, horizon=h, source=source, x_packets=x, sr_received=sr_recv,
        relay=relay, z_packets=z, rd_received=rd_recv, destination=dest,
    )
