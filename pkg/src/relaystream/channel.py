"""Sliding-window burst-erasure channel model.

A pattern is admissible for bounds (b, T) when every window of T+1
consecutive slots sees at most one contiguous erased run of length <= b.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np


@dataclass(frozen=True)
class ErasurePattern:
    horizon: int
    erased: frozenset[int]

    def __post_init__(self):
        if any(s < 0 or s >= self.horizon for s in self.erased):
            raise ValueError("erased slots must lie inside [0, horizon)")

    def runs(self) -> list[tuple[int, int]]:
        """Maximal erased runs as (start, length), ascending."""
        out = []
        for s in sorted(self.erased):
            if out and s == out[-1][0] + out[-1][1]:
                out[-1] = (out[-1][0], out[-1][1] + 1)
            else:
                out.append((s, 1))
        return out

    def __str__(self):
        return ",".join(f"{s}:{l}" for s, l in self.runs()) or "-"


def empty_pattern(horizon: int) -> ErasurePattern:
    return ErasurePattern(horizon, frozenset())


def single_burst(horizon: int, start: int, length: int) -> ErasurePattern:
    if length < 0 or (length > 0 and (start < 0 or start + length > horizon)):
        raise ValueError(f"burst {start}:{length} does not fit in horizon {horizon}")
    return ErasurePattern(horizon, frozenset(range(start, start + length)))


def violating_window(pat: ErasurePattern, b: int, T: int) -> Optional[int]:
    """Start slot of some violating (T+1)-window, or None if admissible."""
    erased = sorted(pat.erased)
    if not erased:
        return None
    for w in range(pat.horizon):
        inside = [s for s in erased if w <= s <= w + T]
        if not inside:
            continue
        if len(inside) > b:
            return w
        if inside[-1] - inside[0] + 1 != len(inside):
            return w  # more than one run in the window
    return None


def validate(pat: ErasurePattern, b: int, T: int) -> bool:
    return violating_window(pat, b, T) is None


def enumerate_single_bursts(horizon: int, b: int, T: int) -> Iterator[ErasurePattern]:
    """Empty pattern plus one burst of each length 1..b at each start.

    Yields bH - b(b-1)/2 + 1 patterns (bursts fully inside the horizon),
    deterministically ordered by (length, start).
    """
    yield empty_pattern(horizon)
    for length in range(1, b + 1):
        for start in range(horizon - length + 1):
            yield single_burst(horizon, start, length)


def all_admissible_patterns(horizon: int, b: int, T: int) -> list[ErasurePattern]:
    """Brute-force filter of all 2^horizon subsets; tiny horizons only."""
    if horizon > 16:
        raise ValueError("brute-force enumeration is for horizons <= 16")
    out = []
    for mask in range(1 << horizon):
        erased = frozenset(s for s in range(horizon) if mask >> s & 1)
        pat = ErasurePattern(horizon, erased)
        if validate(pat, b, T):
            out.append(pat)
    return out


@dataclass(frozen=True)
class ReceivedStream:
    """Erasure-marked packet stream: values are zeroed where received=False."""

    values: np.ndarray
    received: np.ndarray

    @property
    def horizon(self) -> int:
        return self.values.shape[0]

    def packet(self, slot: int) -> Optional[np.ndarray]:
        return self.values[slot] if self.received[slot] else None


def apply(packets, pat: ErasurePattern) -> ReceivedStream:
    """Mark erased slots; accepts a raw grid or an already-marked stream."""
    if isinstance(packets, ReceivedStream):
        values, received = packets.values.copy(), packets.received.copy()
    else:
        values = np.array(packets, dtype=np.uint8)
        received = np.ones(values.shape[0], dtype=bool)
    if values.shape[0] != pat.horizon:
        raise ValueError(f"stream horizon {values.shape[0]} != pattern horizon {pat.horizon}")
    for s in pat.erased:
        received[s] = False
        values[s] = 0
    values.flags.writeable = False
    received.flags.writeable = False
    return ReceivedStream(values, received)


def parse_burst_literal(text: str, horizon: int) -> ErasurePattern:
    """CLI literal ``start:len``; 'none' or '' means no erasures."""
    text = text.strip()
    if text in ("", "-", "none"):
        return empty_pattern(horizon)
    try:
        start_s, len_s = text.split(":")
        start, length = int(start_s), int(len_s)
    except ValueError as exc:
        raise ValueError(f"expected 'start:len', got {text!r}") from exc
    return single_burst(horizon, start, length)
