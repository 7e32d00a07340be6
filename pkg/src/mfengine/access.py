"""Access operations over moving features: location, speed, acceleration,
sub-trajectories, time lookup by position, time-to-distance curves and
pairwise distance.

All distances and speeds are Euclidean in CRS units (per second for rates).
No geodesic math is performed, even for geographic CRSs — callers working
in degrees get degrees back.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

from .errors import DimensionalityMismatch, EmptyIntersection, UnsupportedInterpolation
from .interpolation import (
    GAP,
    OUT_OF_RANGE,
    UNDEFINED,
    SampleResult,
    bracketing_segment,
    position_at,
    value,
    value_at,
)
from .model import (
    InterpolationMode,
    MovingFeature,
    Period,
    Position,
    STBounds,
    TemporalGeometry,
    TemporalProperty,
    Track,
)


@dataclass(frozen=True)
class VelocityVector:
    """Instantaneous velocity: per-axis components and their Euclidean norm."""

    components: tuple[float, ...]
    speed: float


@dataclass(frozen=True)
class TimeToDistanceCurve:
    """Piecewise-linear cumulative travelled distance over time.

    One breakpoint per geometry sample; between tracks the distance carries
    forward unchanged and the interval is listed in ``gaps``.
    """

    breakpoints: tuple[tuple[int, float], ...]
    gaps: tuple[Period, ...] = ()

    @property
    def final_distance(self) -> float:
        return self.breakpoints[-1][1] if self.breakpoints else 0.0

    def distance_at(self, t: int) -> SampleResult:
        times = [bt for bt, _ in self.breakpoints]
        if not times or t < times[0] or t > times[-1]:
            return OUT_OF_RANGE
        i = bisect_left(times, t)
        if times[i] == t:
            return value(self.breakpoints[i][1])
        t0, d0 = self.breakpoints[i - 1]
        t1, d1 = self.breakpoints[i]
        for g in self.gaps:
            if g.begin <= t0 and t1 <= g.end:
                return value(d0)  # inside a gap the distance is carried forward
        lam = (t - t0) / (t1 - t0)
        return value((1.0 - lam) * d0 + lam * d1)


def _require_linear(f: MovingFeature, op: str) -> None:
    if f.geometry.interpolation is not InterpolationMode.LINEAR:
        raise UnsupportedInterpolation(
            f"{op} needs linear geometry, feature {f.id!r} is "
            f"{f.geometry.interpolation.value.lower()}"
        )


def _locate(f: MovingFeature, t: int) -> Track | SampleResult:
    """Track containing t, or the miss result (OUT_OF_RANGE / GAP)."""
    g = f.geometry
    if not g.has_samples or t < g.first_time or t > g.last_time:
        return OUT_OF_RANGE
    for track in g.tracks:
        if not track.samples:
            continue
        if t < track.first_time:
            return GAP
        if t <= track.last_time:
            return track
    return GAP


def location_at(f: MovingFeature, t: int) -> SampleResult:
    """Position of the feature at t (see interpolation.position_at)."""
    return position_at(f.geometry, t)


def _segment_velocity(track: Track, i: int, j: int) -> VelocityVector:
    (t0, p0), (t1, p1) = track.samples[i], track.samples[j]
    dt = (t1 - t0) / 1000.0
    comps = tuple((b - a) / dt for a, b in zip(p0, p1))
    return VelocityVector(comps, math.hypot(*comps))


def velocity_at(f: MovingFeature, t: int) -> SampleResult:
    """Velocity at t under linear geometry.

    Piecewise constant per segment. At an interior vertex the right
    derivative applies (the following segment), at a track's final sample
    the left derivative; velocity is therefore right-continuous, matching
    the stepwise convention for properties.
    """
    _require_linear(f, "velocity_at")
    located = _locate(f, t)
    if isinstance(located, SampleResult):
        return located
    seg = bracketing_segment(located, t)
    if seg is None:
        return UNDEFINED
    return value(_segment_velocity(located, *seg))


def acceleration_at(f: MovingFeature, t: int) -> SampleResult:
    """Acceleration at t: the zero vector wherever the position is defined.

    Velocity is piecewise constant under linear interpolation, so the
    acceleration vanishes in segment interiors; at vertices the zero vector
    is returned by convention.
    """
    _require_linear(f, "acceleration_at")
    located = _locate(f, t)
    if isinstance(located, SampleResult):
        return located
    return value((0.0,) * located.dims)


def _clip_track(track: Track, t1: int, t2: int, mode: InterpolationMode, g) -> list[tuple[int, Position]]:
    lo = max(track.first_time, t1)
    hi = min(track.last_time, t2)
    if lo > hi:
        return []
    samples = [(t, p) for t, p in track.samples if lo <= t <= hi]
    has_lo = bool(samples) and samples[0][0] == lo
    has_hi = bool(samples) and samples[-1][0] == hi
    if mode is InterpolationMode.LINEAR:
        if not has_lo:
            samples.insert(0, (lo, position_at(g, lo).value))
        if not has_hi:
            samples.append((hi, position_at(g, hi).value))
    elif mode is InterpolationMode.STEPWISE:
        if not has_lo and lo > track.first_time:
            samples.insert(0, (lo, position_at(g, lo).value))
    return samples


def _clip_property(p: TemporalProperty, t1: int, t2: int) -> TemporalProperty | None:
    times = p.times
    if not times or t1 > times[-1] or t2 < times[0]:
        return None
    samples = [(t, v) for t, v in p.samples if t1 <= t <= t2]
    if p.interpolation is InterpolationMode.LINEAR:
        for edge in (t1, t2):
            if times[0] <= edge <= times[-1] and all(t != edge for t, _ in samples):
                res = value_at(p, edge)
                if res.is_value:
                    samples.append((edge, res.value))
    elif p.interpolation is InterpolationMode.STEPWISE:
        if (not samples or samples[0][0] != t1) and times[0] <= t1 <= times[-1]:
            samples.append((t1, value_at(p, t1).value))
    samples.sort(key=lambda s: s[0])
    if not samples:
        return None
    return TemporalProperty(p.name, p.value_type, tuple(samples), p.interpolation)


def sub_trajectory(f: MovingFeature, t1: int, t2: int) -> MovingFeature:
    """Clip the feature to the closed window [t1, t2].

    Boundary samples are interpolated in (linear) or carried onto t1
    (stepwise); tracks wholly outside the window are dropped, and linear
    tracks whose overlap degenerates to a single instant are dropped too.
    Temporal properties are clipped alike. Raises EmptyIntersection when no
    geometry survives.
    """
    if t1 >= t2:
        raise ValueError("t1 must be strictly before t2")
    g = f.geometry
    new_tracks = []
    for track in g.tracks:
        if not track.samples:
            continue
        samples = _clip_track(track, t1, t2, g.interpolation, g)
        if not samples:
            continue
        if g.interpolation is InterpolationMode.LINEAR and len(samples) < 2:
            continue
        new_tracks.append(Track(tuple(samples)))
    if not new_tracks:
        raise EmptyIntersection(f"[{t1}, {t2}] does not intersect feature {f.id!r}")
    props = []
    for p in f.temporal_properties:
        clipped = _clip_property(p, t1, t2)
        if clipped is not None:
            props.append(clipped)
    return MovingFeature(
        id=f.id,
        geometry=TemporalGeometry(tuple(new_tracks), g.interpolation),
        temporal_properties=tuple(props),
        static_properties=dict(f.static_properties),
        crs=f.crs,
    )


def _segment_hits(t0: int, t1: int, p0: Position, p1: Position, p: Position, tol: float):
    """Closed intervals (in ms, floats) where the segment is within tol of p."""
    intervals = []
    d = [b - a for a, b in zip(p0, p1)]
    w = [a - c for a, c in zip(p0, p)]
    if math.dist(p0, p) <= tol:
        intervals.append((float(t0), float(t0)))
    if math.dist(p1, p) <= tol:
        intervals.append((float(t1), float(t1)))
    a = sum(x * x for x in d)
    b = 2.0 * sum(x * y for x, y in zip(w, d))
    c = sum(x * x for x in w) - tol * tol
    span = t1 - t0
    if a == 0.0:
        if c <= 0.0:
            intervals.append((float(t0), float(t1)))
        return intervals
    disc = b * b - 4.0 * a * c
    if disc >= 0.0:
        root = math.sqrt(disc)
        lo = max(0.0, (-b - root) / (2.0 * a))
        hi = min(1.0, (-b + root) / (2.0 * a))
        if lo <= hi:
            intervals.append((t0 + lo * span, t0 + hi * span))
    return intervals


def time_at_position(f: MovingFeature, p: Position, tol: float = 0.0) -> list[int]:
    """Instants at which the feature passes within tol of position p.

    Contiguous solution intervals are reported as one representative instant
    (the interval midpoint, quantized to the millisecond grid inside the
    interval when possible); isolated vertex hits are reported exactly.
    Sorted ascending; empty when the position is never reached.
    """
    _require_linear(f, "time_at_position")
    if tol < 0:
        raise ValueError("tolerance must be >= 0")
    p = tuple(float(x) for x in p)
    if f.geometry.dims and len(p) != f.geometry.dims:
        raise DimensionalityMismatch(
            f"position is {len(p)}D but feature {f.id!r} is {f.geometry.dims}D"
        )
    intervals: list[tuple[float, float]] = []
    for track in f.geometry.tracks:
        for (t0, p0), (t1, p1) in zip(track.samples, track.samples[1:]):
            intervals.extend(_segment_hits(t0, t1, p0, p1, p, tol))
    if not intervals:
        return []
    intervals.sort()
    merged = [intervals[0]]
    for lo, hi in intervals[1:]:
        mlo, mhi = merged[-1]
        if lo <= mhi + 1e-6:
            merged[-1] = (mlo, max(mhi, hi))
        else:
            merged.append((lo, hi))
    out = []
    for lo, hi in merged:
        mid = round((lo + hi) / 2.0)
        grid_lo = math.ceil(lo - 1e-9)
        grid_hi = math.floor(hi + 1e-9)
        if grid_lo <= grid_hi:
            mid = min(max(mid, grid_lo), grid_hi)
        out.append(int(mid))
    return sorted(dict.fromkeys(out))


def time_to_distance(f: MovingFeature) -> TimeToDistanceCurve:
    """Cumulative Euclidean path length sampled at every geometry vertex."""
    _require_linear(f, "time_to_distance")
    breakpoints: list[tuple[int, float]] = []
    gaps: list[Period] = []
    cum = 0.0
    prev_end: int | None = None
    for track in f.geometry.tracks:
        if not track.samples:
            continue
        if prev_end is not None:
            gaps.append(Period(prev_end, track.first_time))
        prev = None
        for t, pos in track.samples:
            if prev is not None:
                cum += math.dist(prev, pos)
            breakpoints.append((t, cum))
            prev = pos
        prev_end = track.last_time
    return TimeToDistanceCurve(tuple(breakpoints), tuple(gaps))


def distance_between(f1: MovingFeature, f2: MovingFeature, t: int) -> SampleResult:
    """Euclidean distance between the two features' positions at t.

    Misses propagate: OUT_OF_RANGE dominates GAP dominates UNDEFINED."""
    r1 = location_at(f1, t)
    r2 = location_at(f2, t)
    for kind in (OUT_OF_RANGE, GAP, UNDEFINED):
        if r1 == kind or r2 == kind:
            return kind
    p1, p2 = r1.value, r2.value
    if len(p1) != len(p2):
        raise DimensionalityMismatch(
            f"features {f1.id!r} and {f2.id!r} have different dimensionality"
        )
    return value(math.dist(p1, p2))


def _axis_interval(p0: float, d: float, lo: float, hi: float) -> tuple[float, float] | None:
    """Lambda range in [0,1] where p0 + lam*d lies within [lo, hi]."""
    if d == 0.0:
        return (0.0, 1.0) if lo <= p0 <= hi else None
    l1 = (lo - p0) / d
    l2 = (hi - p0) / d
    if l1 > l2:
        l1, l2 = l2, l1
    l1 = max(l1, 0.0)
    l2 = min(l2, 1.0)
    return (l1, l2) if l1 <= l2 else None


def intersects_box(f: MovingFeature, box: STBounds) -> bool:
    """True iff some evaluable instant inside box.period puts the feature
    inside the spatial box. Computed per segment by interval arithmetic, no
    sampling. A dimensionality mismatch cannot intersect and yields False.
    """
    g = f.geometry
    if not g.has_samples or g.dims != box.dims:
        return False
    b0, b1 = box.period.begin, box.period.end
    if g.interpolation is InterpolationMode.LINEAR:
        for track in g.tracks:
            if len(track.samples) == 1:
                t, pos = track.samples[0]
                if b0 <= t <= b1 and box.contains_position(pos):
                    return True
            for (t0, p0), (t1, p1) in zip(track.samples, track.samples[1:]):
                w0, w1 = max(t0, b0), min(t1, b1)
                if w0 > w1:
                    continue
                lo = (w0 - t0) / (t1 - t0)
                hi = (w1 - t0) / (t1 - t0)
                for p0c, p1c, blo, bhi in zip(p0, p1, box.lower, box.upper):
                    rng = _axis_interval(p0c, p1c - p0c, blo, bhi)
                    if rng is None:
                        lo, hi = 1.0, 0.0
                        break
                    lo, hi = max(lo, rng[0]), min(hi, rng[1])
                if lo <= hi:
                    return True
        return False
    if g.interpolation is InterpolationMode.STEPWISE:
        for track in g.tracks:
            times = track.times
            for i, (t, pos) in enumerate(track.samples):
                held_until = times[i + 1] if i + 1 < len(times) else t
                start = max(t, b0)
                if not box.contains_position(pos):
                    continue
                if i + 1 < len(times):
                    # value holds on [t, next); needs an instant below both ends
                    if start <= b1 and start < held_until:
                        return True
                elif b0 <= t <= b1:
                    return True
        return False
    # discrete: defined only at the samples themselves
    for track in g.tracks:
        for t, pos in track.samples:
            if b0 <= t <= b1 and box.contains_position(pos):
                return True
    return False


# re-exported for callers that work with features rather than raw series
def property_value_at(f: MovingFeature, name: str, t: int) -> SampleResult:
    p = f.property_named(name)
    if p is None:
        raise KeyError(name)
    return value_at(p, t)
