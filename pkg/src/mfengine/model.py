"""Canonical in-memory model of moving features.

A moving feature couples a temporal geometry (timestamped positions grouped
into gap-separated tracks) with any number of temporal properties (named,
typed value series with their own timestamps and interpolation mode) and
static text properties. All values are immutable after construction and safe
to share between threads.

Construction is deliberately permissive: invariants are checked by
``validate_feature`` / ``validate_collection``, which report diagnostics
instead of raising, so malformed input can be inspected rather than lost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional

from .errors import DimensionalityMismatch, EmptyCollection

Position = tuple[float, ...]


class InterpolationMode(Enum):
    DISCRETE = "Discrete"
    STEPWISE = "Stepwise"
    LINEAR = "Linear"

    @classmethod
    def from_text(cls, text: str) -> "InterpolationMode":
        for mode in cls:
            if mode.value.lower() == text.strip().lower():
                return mode
        raise ValueError(f"unknown interpolation mode {text!r}")


class ValueType(Enum):
    INTEGER = "integer"
    REAL = "real"
    TEXT = "text"
    BOOLEAN = "boolean"

    def matches(self, value: object) -> bool:
        if self is ValueType.BOOLEAN:
            return isinstance(value, bool)
        if self is ValueType.INTEGER:
            return isinstance(value, int) and not isinstance(value, bool)
        if self is ValueType.REAL:
            return isinstance(value, float)
        return isinstance(value, str)

    @property
    def numeric(self) -> bool:
        return self in (ValueType.INTEGER, ValueType.REAL)


class Severity(Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"
    INFO = "INFO"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity.value} {self.code} {self.message}"


def error(code: str, message: str) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message)


def warning(code: str, message: str) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message)


@dataclass(frozen=True)
class TimeInstantRange:
    """Closed time interval in epoch milliseconds."""

    begin: int
    end: int

    def contains(self, t: int) -> bool:
        return self.begin <= t <= self.end


# The encodings call this a period; keep both names available.
Period = TimeInstantRange


@dataclass(frozen=True)
class Track:
    """One run of strictly time-ordered samples with no interior gaps."""

    samples: tuple[tuple[int, Position], ...]
    _times: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        samples = tuple((int(t), tuple(float(c) for c in pos)) for t, pos in self.samples)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "_times", tuple(t for t, _ in samples))

    @property
    def times(self) -> tuple[int, ...]:
        return self._times

    @property
    def first_time(self) -> int:
        return self._times[0]

    @property
    def last_time(self) -> int:
        return self._times[-1]

    @property
    def dims(self) -> int:
        return len(self.samples[0][1]) if self.samples else 0


@dataclass(frozen=True)
class TemporalGeometry:
    """Gap-separated tracks of timestamped positions under one interpolation mode."""

    tracks: tuple[Track, ...]
    interpolation: InterpolationMode = InterpolationMode.LINEAR

    def __post_init__(self):
        object.__setattr__(self, "tracks", tuple(self.tracks))

    @property
    def has_samples(self) -> bool:
        return any(t.samples for t in self.tracks)

    @property
    def first_time(self) -> int:
        return self.tracks[0].first_time

    @property
    def last_time(self) -> int:
        return self.tracks[-1].last_time

    @property
    def dims(self) -> int:
        for t in self.tracks:
            if t.samples:
                return t.dims
        return 0

    def sample_times(self) -> list[int]:
        return [t for tr in self.tracks for t in tr.times]

    def iter_samples(self) -> Iterator[tuple[int, Position]]:
        for tr in self.tracks:
            yield from tr.samples


@dataclass(frozen=True)
class TemporalProperty:
    """A named, typed value series with its own timestamps and mode."""

    name: str
    value_type: ValueType
    samples: tuple[tuple[int, object], ...]
    interpolation: InterpolationMode = InterpolationMode.STEPWISE

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple((int(t), v) for t, v in self.samples))

    @property
    def times(self) -> tuple[int, ...]:
        return tuple(t for t, _ in self.samples)

    @property
    def values(self) -> tuple:
        return tuple(v for _, v in self.samples)


@dataclass(frozen=True)
class MovingFeature:
    id: str
    geometry: TemporalGeometry
    temporal_properties: tuple[TemporalProperty, ...] = ()
    static_properties: dict = field(default_factory=dict)
    crs: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "temporal_properties", tuple(self.temporal_properties))
        object.__setattr__(self, "static_properties", dict(self.static_properties))

    def property_named(self, name: str) -> Optional[TemporalProperty]:
        for p in self.temporal_properties:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class STBounds:
    """Spatio-temporal bounding box plus the document's offset time unit."""

    lower: Position
    upper: Position
    period: Period
    time_unit: str = "sec"

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(c) for c in self.lower))
        object.__setattr__(self, "upper", tuple(float(c) for c in self.upper))

    @property
    def dims(self) -> int:
        return len(self.lower)

    def contains_position(self, pos: Position) -> bool:
        if len(pos) != len(self.lower):
            return False
        return all(lo <= c <= hi for lo, c, hi in zip(self.lower, pos, self.upper))

    def contains_time(self, t: int) -> bool:
        return self.period.contains(t)


@dataclass(frozen=True)
class FeatureCollection:
    bounds: Optional[STBounds] = None
    features: tuple[MovingFeature, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "features", tuple(self.features))

    def feature(self, feature_id: str) -> Optional[MovingFeature]:
        for f in self.features:
            if f.id == feature_id:
                return f
        return None


def _validate_track(prefix: str, track: Track, mode: InterpolationMode) -> list[Diagnostic]:
    diags = []
    if not track.samples:
        diags.append(error("EMPTY_TRACK", f"{prefix}: track has no samples"))
        return diags
    if mode is InterpolationMode.LINEAR and len(track.samples) < 2:
        diags.append(error("LINEAR_TRACK_TOO_SHORT", f"{prefix}: linear track needs >=2 samples"))
    times = track.times
    if any(b <= a for a, b in zip(times, times[1:])):
        diags.append(error("NON_INCREASING_TIMESTAMPS", f"{prefix}: non-increasing timestamps"))
    dims = track.dims
    for t, pos in track.samples:
        if len(pos) != dims:
            diags.append(error("MIXED_DIMENSIONALITY", f"{prefix}: positions of mixed dimensionality"))
            break
    if dims not in (2, 3):
        diags.append(error("BAD_DIMENSIONALITY", f"{prefix}: positions must be 2D or 3D, got {dims}D"))
    for t, pos in track.samples:
        if not all(math.isfinite(c) for c in pos):
            diags.append(error("NONFINITE_COORDINATE", f"{prefix}: non-finite coordinate at t={t}"))
            break
    return diags


def validate_feature(f: MovingFeature) -> list[Diagnostic]:
    """Check every model invariant of one feature.

    Returns an empty list iff the feature is fully valid. WARNING entries
    flag suspicious-but-legal data; ERROR entries are invariant violations.
    Never mutates or raises.
    """
    diags: list[Diagnostic] = []
    if not f.id:
        diags.append(error("EMPTY_ID", "feature id is empty"))
    geom = f.geometry
    if not geom.has_samples:
        diags.append(error("EMPTY_GEOMETRY", f"feature {f.id!r}: geometry has no samples"))
    dims_seen = set()
    for i, track in enumerate(geom.tracks):
        diags.extend(_validate_track(f"feature {f.id!r} track {i}", track, geom.interpolation))
        if track.samples:
            dims_seen.add(track.dims)
    if len(dims_seen) > 1:
        diags.append(error("MIXED_DIMENSIONALITY", f"feature {f.id!r}: tracks of mixed dimensionality"))
    for a, b in zip(geom.tracks, geom.tracks[1:]):
        if a.samples and b.samples and b.first_time <= a.last_time:
            diags.append(error("TRACKS_OVERLAP", f"feature {f.id!r}: tracks overlap or are unsorted"))
    names = set()
    for p in f.temporal_properties:
        if p.name in names:
            diags.append(error("DUPLICATE_PROPERTY_NAME", f"feature {f.id!r}: duplicate property {p.name!r}"))
        names.add(p.name)
        prefix = f"feature {f.id!r} property {p.name!r}"
        if not p.samples:
            diags.append(error("EMPTY_PROPERTY", f"{prefix}: no samples"))
            continue
        times = p.times
        if any(b <= a for a, b in zip(times, times[1:])):
            diags.append(error("NON_INCREASING_TIMESTAMPS", f"{prefix}: non-increasing timestamps"))
        if p.interpolation is InterpolationMode.LINEAR and not p.value_type.numeric:
            diags.append(error("LINEAR_NON_NUMERIC", f"{prefix}: linear interpolation needs numeric values"))
        for t, v in p.samples:
            if not p.value_type.matches(v):
                diags.append(
                    error("VALUE_TYPE_MISMATCH", f"{prefix}: value {v!r} at t={t} is not {p.value_type.value}")
                )
                break
    if geom.has_samples and geom.first_time == geom.last_time:
        diags.append(warning("ZERO_DURATION", f"feature {f.id!r}: zero-duration feature"))
    return diags


def _bounds_diagnostics(c: FeatureCollection) -> list[Diagnostic]:
    declared = c.bounds
    if declared is None:
        return []
    try:
        actual = computed_bounds(c)
    except (EmptyCollection, DimensionalityMismatch):
        return []
    diags = []
    if declared.dims != actual.dims:
        diags.append(
            warning(
                "BOUNDS_NOT_COVERING",
                f"bounds do not cover data: declared {declared.dims}D, data {actual.dims}D",
            )
        )
        return diags
    uncovered = [
        i
        for i in range(actual.dims)
        if actual.lower[i] < declared.lower[i] or actual.upper[i] > declared.upper[i]
    ]
    if uncovered or actual.period.begin < declared.period.begin or actual.period.end > declared.period.end:
        diags.append(warning("BOUNDS_NOT_COVERING", "bounds do not cover data"))
    if declared.period.end > actual.period.end:
        diags.append(warning("BOUNDS_NOT_TIGHT", "declared period end beyond data"))
    if declared.period.begin < actual.period.begin:
        diags.append(warning("BOUNDS_NOT_TIGHT", "declared period begins before data"))
    return diags


def validate_collection(c: FeatureCollection) -> list[Diagnostic]:
    """Per-feature diagnostics plus collection-level checks.

    Collection checks: duplicate feature ids (ERROR) and declared bounds
    that fail to cover the data or are looser than the data (WARNING).
    """
    diags: list[Diagnostic] = []
    seen = set()
    for f in c.features:
        if f.id in seen:
            diags.append(error("DUPLICATE_FEATURE_ID", f"duplicate feature id {f.id!r}"))
        seen.add(f.id)
        diags.extend(validate_feature(f))
    diags.extend(_bounds_diagnostics(c))
    return diags


def computed_bounds(c: FeatureCollection) -> STBounds:
    """Tight bounding box over all positions and tight period over all timestamps.

    The period covers geometry and temporal-property timestamps alike; the
    box covers geometry positions. Raises EmptyCollection when no feature
    has a sample, DimensionalityMismatch when features mix 2D and 3D data.
    """
    lower: Optional[list[float]] = None
    upper: Optional[list[float]] = None
    t_min: Optional[int] = None
    t_max: Optional[int] = None
    for f in c.features:
        for t, pos in f.geometry.iter_samples():
            if lower is None:
                lower = list(pos)
                upper = list(pos)
            else:
                if len(pos) != len(lower):
                    raise DimensionalityMismatch("features mix 2D and 3D positions")
                for i, comp in enumerate(pos):
                    lower[i] = min(lower[i], comp)
                    upper[i] = max(upper[i], comp)
            t_min = t if t_min is None else min(t_min, t)
            t_max = t if t_max is None else max(t_max, t)
        for p in f.temporal_properties:
            for t, _ in p.samples:
                t_min = t if t_min is None else min(t_min, t)
                t_max = t if t_max is None else max(t_max, t)
    if lower is None or t_min is None:
        raise EmptyCollection("no geometry samples in collection")
    unit = c.bounds.time_unit if c.bounds is not None else "sec"
    return STBounds(tuple(lower), tuple(upper), Period(t_min, t_max), unit)
