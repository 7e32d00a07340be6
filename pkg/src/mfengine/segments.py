"""Shared machinery for the segment-based encodings (CSV and XML).

Both encodings describe movement as rows/elements carrying a start time, an
end time, a point chain and one value per declared attribute. Parsing chains
contiguous segments (matching end/start times and junction positions) into
tracks; a jump in time starts a new track and leaves a gap. Writing slices a
feature back into two-point segments whose boundaries are the union of
geometry and attribute sample times, so every attribute change falls on a
segment boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CodecError
from .interpolation import position_at, track_resample_times, value_at
from .model import (
    InterpolationMode,
    MovingFeature,
    Position,
    TemporalGeometry,
    TemporalProperty,
    Track,
    ValueType,
)

AttrDef = tuple[str, ValueType]

XSD_TO_TYPE = {
    "xsd:integer": ValueType.INTEGER,
    "xsd:int": ValueType.INTEGER,
    "xsd:long": ValueType.INTEGER,
    "xsd:double": ValueType.REAL,
    "xsd:float": ValueType.REAL,
    "xsd:decimal": ValueType.REAL,
    "xsd:string": ValueType.TEXT,
    "xsd:boolean": ValueType.BOOLEAN,
}

TYPE_TO_XSD = {
    ValueType.INTEGER: "xsd:integer",
    ValueType.REAL: "xsd:double",
    ValueType.TEXT: "xsd:string",
    ValueType.BOOLEAN: "xsd:boolean",
}


def parse_scalar(text: str, vtype: ValueType):
    """Parse one attribute value from its document text form."""
    text = text.strip()
    try:
        if vtype is ValueType.INTEGER:
            return int(text)
        if vtype is ValueType.REAL:
            return float(text)
        if vtype is ValueType.BOOLEAN:
            if text.lower() in ("true", "1"):
                return True
            if text.lower() in ("false", "0"):
                return False
            raise ValueError(text)
    except ValueError:
        raise CodecError("BAD_ATTRIBUTE_VALUE", f"cannot parse {text!r} as {vtype.value}") from None
    return text


def format_scalar(value, vtype: ValueType) -> str:
    if vtype is ValueType.BOOLEAN:
        return "true" if value else "false"
    if vtype is ValueType.REAL:
        return repr(float(value))
    return str(value)


def parse_floats(text: str) -> list[float]:
    """Whitespace-separated floats; stray commas are tolerated as separators."""
    parts = text.replace(",", " ").split()
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise CodecError("BAD_POS_LIST", f"not a number list: {text!r}") from None


@dataclass(frozen=True)
class SegmentRow:
    """One parsed segment: a timed point chain plus per-attribute values."""

    feature_id: str
    start_ms: int
    end_ms: int
    positions: tuple[Position, ...]
    attr_values: tuple


def timed_points(row: SegmentRow) -> list[tuple[int, Position]]:
    """Assign timestamps to a segment's points.

    Endpoints take the segment's start/end; interior points are placed by
    cumulative arc length (constant speed along the segment). A zero-length
    chain falls back to even spacing.
    """
    pts = row.positions
    if len(pts) == 2:
        return [(row.start_ms, pts[0]), (row.end_ms, pts[1])]
    cum = [0.0]
    for a, b in zip(pts, pts[1:]):
        cum.append(cum[-1] + math.dist(a, b))
    total = cum[-1]
    span = row.end_ms - row.start_ms
    out = []
    for i, p in enumerate(pts):
        frac = cum[i] / total if total > 0 else i / (len(pts) - 1)
        out.append((row.start_ms + round(frac * span), p))
    out[-1] = (row.end_ms, pts[-1])
    times = [t for t, _ in out]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise CodecError(
            "BAD_SEGMENT_TIMING",
            f"feature {row.feature_id!r}: interior points collapse onto the same millisecond",
        )
    return out


def build_feature(
    feature_id: str,
    rows: list[SegmentRow],
    attr_defs: list[AttrDef],
    crs: str | None,
    static_properties: dict | None = None,
) -> MovingFeature:
    """Chain a feature's segments into tracks and stepwise attribute series.

    Rows are sorted by start time. A row starting exactly where the previous
    one ended must repeat the junction position bit-for-bit; a later start
    opens a new track. Attributes are sampled at every segment start, and the
    final segment's end repeats the last value.
    """
    rows = sorted(rows, key=lambda r: (r.start_ms, r.end_ms))
    tracks: list[list[tuple[int, Position]]] = []
    current: list[tuple[int, Position]] = []
    prop_samples: list[list[tuple[int, object]]] = [[] for _ in attr_defs]

    prev: SegmentRow | None = None
    for row in rows:
        if row.end_ms <= row.start_ms:
            raise CodecError(
                "NON_CHRONOLOGICAL_SEGMENT",
                f"feature {feature_id!r}: segment end {row.end_ms} is not after start {row.start_ms}",
            )
        if prev is not None and row.start_ms < prev.end_ms:
            raise CodecError(
                "OVERLAPPING_SEGMENTS",
                f"feature {feature_id!r}: segments overlap at t={row.start_ms}",
            )
        points = timed_points(row)
        if prev is not None and row.start_ms == prev.end_ms:
            if row.positions[0] != current[-1][1]:
                raise CodecError(
                    "DISCONTINUOUS_JUNCTION",
                    f"feature {feature_id!r}: discontinuous junction at t={row.start_ms}",
                )
            current.extend(points[1:])
        else:
            if current:
                tracks.append(current)
            current = points
        for k in range(len(attr_defs)):
            prop_samples[k].append((row.start_ms, row.attr_values[k]))
        prev = row
    if current:
        tracks.append(current)
    if rows:
        last = rows[-1]
        for k in range(len(attr_defs)):
            prop_samples[k].append((last.end_ms, last.attr_values[k]))

    props = tuple(
        TemporalProperty(name, vtype, tuple(samples), InterpolationMode.STEPWISE)
        for (name, vtype), samples in zip(attr_defs, prop_samples)
    )
    geometry = TemporalGeometry(tuple(Track(tuple(s)) for s in tracks), InterpolationMode.LINEAR)
    return MovingFeature(
        id=feature_id,
        geometry=geometry,
        temporal_properties=props if rows else (),
        static_properties=static_properties or {},
        crs=crs,
    )


@dataclass(frozen=True)
class WriteSegment:
    feature_id: str
    start_ms: int
    end_ms: int
    start_pos: Position
    end_pos: Position
    attr_values: tuple


def check_writable(f: MovingFeature, attr_defs: list[AttrDef]) -> None:
    """Preconditions shared by the segment-based writers."""
    if f.geometry.interpolation is not InterpolationMode.LINEAR:
        raise CodecError(
            "UNSUPPORTED_INTERPOLATION",
            f"feature {f.id!r}: segment encodings support only linear geometry",
        )
    if not f.geometry.has_samples:
        raise CodecError("EMPTY_GEOMETRY", f"feature {f.id!r}: nothing to encode")
    own = [(p.name, p.value_type) for p in f.temporal_properties]
    if own != attr_defs:
        raise CodecError(
            "SCHEMA_MISMATCH",
            f"feature {f.id!r}: attribute columns {own} differ from the document's {attr_defs}",
        )
    for p in f.temporal_properties:
        if p.interpolation is not InterpolationMode.STEPWISE:
            raise CodecError(
                "UNSUPPORTED_INTERPOLATION",
                f"feature {f.id!r}: attribute {p.name!r} must be stepwise for segment encodings",
            )


def feature_segments(f: MovingFeature) -> list[WriteSegment]:
    """Slice a feature into two-point segments for the segment-based writers.

    Boundaries per track are the union of the track's sample times and the
    attribute sample times inside the track's span. Every attribute must be
    evaluable at each boundary.
    """
    props = list(f.temporal_properties)
    segments = []
    for track in f.geometry.tracks:
        if not track.samples:
            continue
        boundaries = track_resample_times(track, props)
        points = []
        for t in boundaries:
            res = position_at(f.geometry, t)
            points.append((t, res.value))
        for (t0, p0), (t1, p1) in zip(points, points[1:]):
            attrs = []
            for p in props:
                res = value_at(p, t0)
                if not res.is_value:
                    raise CodecError(
                        "ATTR_NOT_COVERING",
                        f"feature {f.id!r}: attribute {p.name!r} undefined at t={t0}",
                    )
                attrs.append(res.value)
            segments.append(WriteSegment(f.id, t0, t1, p0, p1, tuple(attrs)))
    return segments
