"""Segment-based CSV encoding of moving features.

Layout: two ``@``-prefixed header lines (spatio-temporal bounds, then column
declarations), followed by one line per trajectory segment::

    @stboundedby,<srs>,2D,<lower>,<upper>,<begin>,<end>,<unit>
    @columns,mfidref,trajectory,<name>,<xsd type>,...
    <mfid>,<start>,<end>,<posList>,<attr>,...

Times are numeric offsets from the declared begin (in the declared unit) or
absolute ISO-8601; positions are space-separated with ``.`` decimal points.
There is no quoting mechanism: a comma inside a text attribute cannot be
serialized. Geometry interpolation is always linear; attributes are
stepwise, sampled at each segment start.
"""

from __future__ import annotations

from .errors import CodecError
from .model import (
    Diagnostic,
    FeatureCollection,
    Period,
    STBounds,
    ValueType,
    computed_bounds,
)
from .segments import (
    TYPE_TO_XSD,
    XSD_TO_TYPE,
    AttrDef,
    SegmentRow,
    build_feature,
    check_writable,
    feature_segments,
    format_scalar,
    parse_floats,
    parse_scalar,
)
from . import timeutil


def format_attr_value(value, vtype: ValueType, feature_id: str) -> str:
    text = format_scalar(value, vtype)
    if "," in text or "\n" in text or "\r" in text:
        raise CodecError(
            "UNSERIALIZABLE_TEXT",
            f"feature {feature_id!r}: value {text!r} contains a comma or newline",
        )
    return text


def _parse_header(lines: list[str]) -> tuple[STBounds, str, int, list[AttrDef]]:
    if not lines or not lines[0].startswith("@stboundedby"):
        raise CodecError("MALFORMED_HEADER", "first line must start with @stboundedby")
    fields = lines[0].split(",")
    if len(fields) != 8:
        raise CodecError("MALFORMED_HEADER", f"@stboundedby needs 8 fields, got {len(fields)}")
    _, srs, dim_text, lower_text, upper_text, begin_text, end_text, unit = fields
    dim_text = dim_text.strip().upper()
    if dim_text not in ("2D", "3D"):
        raise CodecError("MALFORMED_HEADER", f"bad dimension field {dim_text!r}")
    dims = int(dim_text[0])
    lower = parse_floats(lower_text)
    upper = parse_floats(upper_text)
    if len(lower) != dims or len(upper) != dims:
        raise CodecError("MALFORMED_HEADER", "corner dimensionality does not match declared dimension")
    try:
        begin = timeutil.parse_instant(begin_text)
        end = timeutil.parse_instant(end_text)
    except ValueError as exc:
        raise CodecError("MALFORMED_HEADER", f"bad boundary timestamp: {exc}") from None
    try:
        unit_ms = timeutil.unit_millis(unit)
    except ValueError:
        raise CodecError("UNKNOWN_TIME_UNIT", f"unknown time unit {unit.strip()!r}") from None
    bounds = STBounds(tuple(lower), tuple(upper), Period(begin, end), unit.strip())

    if len(lines) < 2 or not lines[1].startswith("@columns"):
        raise CodecError("MALFORMED_HEADER", "second line must start with @columns")
    cols = [c.strip() for c in lines[1].split(",")]
    if cols[1:3] != ["mfidref", "trajectory"]:
        raise CodecError("MALFORMED_HEADER", "@columns must begin with mfidref,trajectory")
    rest = cols[3:]
    if len(rest) % 2 != 0:
        raise CodecError("MALFORMED_HEADER", "attribute columns must be name,type pairs")
    attr_defs: list[AttrDef] = []
    for name, xsd in zip(rest[::2], rest[1::2]):
        if xsd not in XSD_TO_TYPE:
            raise CodecError("UNKNOWN_COLUMN_TYPE", f"unknown column type {xsd!r}")
        attr_defs.append((name, XSD_TO_TYPE[xsd]))
    return bounds, srs.strip(), unit_ms, attr_defs


def parse_csv(doc: str, warnings: list[Diagnostic] | None = None) -> FeatureCollection:
    """Parse an MF-CSV document into a feature collection.

    One feature per distinct mfidref; contiguous segments (matching end and
    start times and junction positions) merge into one track, a jump in time
    opens a new track. Attribute columns become stepwise temporal
    properties.
    """
    lines = [ln.rstrip("\r") for ln in doc.split("\n")]
    lines = [ln for ln in lines if ln.strip()]
    bounds, srs, unit_ms, attr_defs = _parse_header(lines)
    base = bounds.period.begin
    crs = srs or None

    rows_by_feature: dict[str, list[SegmentRow]] = {}
    for lineno, line in enumerate(lines[2:], start=3):
        fields = line.split(",")
        expected = 4 + len(attr_defs)
        if len(fields) != expected:
            raise CodecError(
                "WRONG_FIELD_COUNT",
                f"line {lineno}: expected {expected} comma-separated fields, got {len(fields)}",
            )
        mfid = fields[0].strip()
        if not mfid:
            raise CodecError("WRONG_FIELD_COUNT", f"line {lineno}: empty mfidref")
        try:
            start = timeutil.parse_time_value(fields[1], base, unit_ms)
            end = timeutil.parse_time_value(fields[2], base, unit_ms)
        except ValueError as exc:
            raise CodecError("BAD_TIMESTAMP", f"line {lineno}: {exc}") from None
        coords = parse_floats(fields[3])
        if len(coords) % bounds.dims != 0:
            raise CodecError(
                "BAD_COORDINATE_ARITY",
                f"line {lineno}: {len(coords)} values do not form {bounds.dims}D points",
            )
        points = tuple(
            tuple(coords[i : i + bounds.dims]) for i in range(0, len(coords), bounds.dims)
        )
        if len(points) < 2:
            raise CodecError("BAD_POS_LIST", f"line {lineno}: a segment needs at least 2 points")
        values = tuple(
            parse_scalar(fields[4 + k], attr_defs[k][1]) for k in range(len(attr_defs))
        )
        rows_by_feature.setdefault(mfid, []).append(
            SegmentRow(mfid, start, end, points, values)
        )

    features = tuple(
        build_feature(mfid, rows, attr_defs, crs) for mfid, rows in rows_by_feature.items()
    )
    return FeatureCollection(bounds=bounds, features=features)


def write_csv(c: FeatureCollection) -> str:
    """Serialize a collection as MF-CSV.

    Requires linear geometry and stepwise attributes with identical columns
    on every feature. Segment boundaries are the union of geometry and
    attribute sample times, so attribute changes land on segment ends. Times
    are written as offsets from the bounds begin; the declared unit is kept
    when every offset is exact in it, otherwise seconds are used. Static
    properties are not representable and are ignored here (the transcoder
    reports the drop).
    """
    attr_defs: list[AttrDef] = (
        [(p.name, p.value_type) for p in c.features[0].temporal_properties] if c.features else []
    )
    dims = c.features[0].geometry.dims if c.features else None
    for f in c.features:
        check_writable(f, attr_defs)
        if f.geometry.dims != dims:
            raise CodecError(
                "MIXED_DIMENSIONALITY",
                f"feature {f.id!r} is {f.geometry.dims}D but the document is {dims}D",
            )
    bounds = c.bounds if c.bounds is not None else (computed_bounds(c) if c.features else None)
    if bounds is None:
        raise CodecError("EMPTY_GEOMETRY", "cannot derive bounds for an empty collection")
    if dims is not None and bounds.dims != dims:
        raise CodecError(
            "MIXED_DIMENSIONALITY",
            f"declared bounds are {bounds.dims}D but the data is {dims}D",
        )
    dims = bounds.dims

    segments = [seg for f in c.features for seg in feature_segments(f)]
    base = bounds.period.begin
    unit = bounds.time_unit
    unit_ms = timeutil.unit_millis(unit)
    deltas = [t - base for seg in segments for t in (seg.start_ms, seg.end_ms)]
    if not all(timeutil.offset_is_exact(d, unit_ms) for d in deltas):
        unit, unit_ms = "sec", 1000

    crs = next((f.crs for f in c.features if f.crs), "")
    lower = " ".join(repr(x) for x in bounds.lower)
    upper = " ".join(repr(x) for x in bounds.upper)
    lines = [
        "@stboundedby,%s,%dD,%s,%s,%s,%s,%s"
        % (
            crs,
            dims,
            lower,
            upper,
            timeutil.format_instant(bounds.period.begin),
            timeutil.format_instant(bounds.period.end),
            unit,
        ),
        "@columns,mfidref,trajectory"
        + "".join(f",{name},{TYPE_TO_XSD[vtype]}" for name, vtype in attr_defs),
    ]
    for seg in segments:
        poslist = " ".join(repr(x) for p in (seg.start_pos, seg.end_pos) for x in p)
        attrs = "".join(
            "," + format_attr_value(v, attr_defs[k][1], seg.feature_id)
            for k, v in enumerate(seg.attr_values)
        )
        lines.append(
            "%s,%s,%s,%s%s"
            % (
                seg.feature_id,
                timeutil.format_offset(seg.start_ms - base, unit_ms),
                timeutil.format_offset(seg.end_ms - base, unit_ms),
                poslist,
                attrs,
            )
        )
    return "\n".join(lines) + "\n"
