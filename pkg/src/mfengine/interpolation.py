"""Evaluate temporal geometries and properties at arbitrary instants.

All evaluators are total: instead of raising, they return a SampleResult
whose kind distinguishes a real value from the three ways a query can miss
(outside the sampled extent, inside a gap between tracks, or between
samples under discrete interpolation).
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Optional

from .model import InterpolationMode, Position, TemporalGeometry, TemporalProperty, Track, ValueType

KIND_VALUE = "value"
KIND_GAP = "gap"
KIND_OUT_OF_RANGE = "out_of_range"
KIND_UNDEFINED = "undefined"


@dataclass(frozen=True)
class SampleResult:
    kind: str
    value: object = None

    @property
    def is_value(self) -> bool:
        return self.kind == KIND_VALUE

    def __bool__(self) -> bool:
        return self.is_value

    @property
    def token(self) -> str:
        """Upper-case wire token: VALUE, GAP, OUT_OF_RANGE or UNDEFINED."""
        return self.kind.upper()


def value(v: object) -> SampleResult:
    return SampleResult(KIND_VALUE, v)


GAP = SampleResult(KIND_GAP)
OUT_OF_RANGE = SampleResult(KIND_OUT_OF_RANGE)
UNDEFINED = SampleResult(KIND_UNDEFINED)


def _lerp_position(p0: Position, p1: Position, lam: float) -> Position:
    # (1-lam)*p0 + lam*p1 reproduces both endpoints exactly at lam == 0, 1
    return tuple((1.0 - lam) * a + lam * b for a, b in zip(p0, p1))


def _round_half_away(x: float) -> int:
    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))


def _locate_track(g: TemporalGeometry, t: int) -> Optional[Track]:
    """Track whose closed span contains t, or None when t falls in a gap.

    Caller must have checked t against the overall extent first.
    """
    for track in g.tracks:
        if not track.samples:
            continue
        if t < track.first_time:
            return None
        if t <= track.last_time:
            return track
    return None


def _eval_series(times: tuple[int, ...], values: tuple, t: int, mode: InterpolationMode, lerp):
    """Shared sample lookup for one gap-free series. t must be within [first, last]."""
    i = bisect_left(times, t)
    if i < len(times) and times[i] == t:
        return value(values[i])
    if mode is InterpolationMode.DISCRETE:
        return UNDEFINED
    if mode is InterpolationMode.STEPWISE:
        return value(values[i - 1])
    t0, t1 = times[i - 1], times[i]
    lam = (t - t0) / (t1 - t0)
    return lerp(values[i - 1], values[i], lam)


def position_at(g: TemporalGeometry, t: int) -> SampleResult:
    """Position of the geometry at instant t.

    Linear mode interpolates affinely between the bracketing samples
    (constant speed along a segment); stepwise holds the latest sample;
    discrete yields a value only exactly at sample timestamps. Queries
    outside the sampled extent return OUT_OF_RANGE, queries strictly
    between two tracks return GAP.
    """
    if not g.has_samples:
        return OUT_OF_RANGE
    if t < g.first_time or t > g.last_time:
        return OUT_OF_RANGE
    track = _locate_track(g, t)
    if track is None:
        return GAP
    positions = tuple(pos for _, pos in track.samples)
    return _eval_series(track.times, positions, t, g.interpolation,
                        lambda a, b, lam: value(_lerp_position(a, b, lam)))


def value_at(p: TemporalProperty, t: int) -> SampleResult:
    """Value of a temporal property at instant t (same mode semantics as positions).

    Stepwise changes take effect exactly at their timestamp: a value sampled
    at t holds on [t, t_next). Linear interpolation of an integer-typed
    property evaluates as real, then rounds half away from zero.
    """
    if not p.samples:
        return OUT_OF_RANGE
    times = p.times
    if t < times[0] or t > times[-1]:
        return OUT_OF_RANGE

    def lerp(a, b, lam):
        if not p.value_type.numeric:
            return UNDEFINED
        x = (1.0 - lam) * a + lam * b
        if p.value_type is ValueType.INTEGER:
            return value(_round_half_away(x))
        return value(x)

    return _eval_series(times, p.values, t, p.interpolation, lerp)


def resample_times(g: TemporalGeometry, props: list[TemporalProperty]) -> list[int]:
    """Sorted, deduplicated union of geometry and property sample times.

    Property times are kept only where the geometry is defined, i.e. inside
    some track's closed span; times falling into gaps (or beyond the
    geometry's extent) are excluded.
    """
    times = set(g.sample_times())
    spans = [(tr.first_time, tr.last_time) for tr in g.tracks if tr.samples]
    for p in props:
        for t, _ in p.samples:
            if any(a <= t <= b for a, b in spans):
                times.add(t)
    return sorted(times)


def track_resample_times(track: Track, props: list[TemporalProperty]) -> list[int]:
    """resample_times restricted to one track's closed span."""
    times = set(track.times)
    a, b = track.first_time, track.last_time
    for p in props:
        for t, _ in p.samples:
            if a <= t <= b:
                times.add(t)
    return sorted(times)


def bracketing_segment(track: Track, t: int) -> Optional[tuple[int, int]]:
    """Indices (i, i+1) of the segment used to evaluate t within the track.

    At an interior vertex the following segment is chosen (right
    derivative); at the track's final sample the preceding one. None for
    single-sample tracks.
    """
    if len(track.samples) < 2:
        return None
    times = track.times
    if t >= times[-1]:
        return len(times) - 2, len(times) - 1
    i = bisect_right(times, t)
    # t < times[-1] here, so i indexes the first time strictly greater than t
    return i - 1, i
