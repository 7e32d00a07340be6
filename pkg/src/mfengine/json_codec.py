"""Point-based JSON encoding of moving features.

A document is one object (or a top-level array of objects, the multi-feature
extension) of the shape::

    {
      "type": "MovingFeature",
      "temporalGeometry": {"type": "MovingPoint", "coordinates": [...],
                           "datetimes": [...], "interpolations": "Linear"},
      "temporalProperties": [{"name", "values", "datetimes", "interpolations"}, ...],
      "stBoundedBy": {"bbox": [...], "period": {"begin", "end"}},
      "properties": {...}
    }

Coordinates/datetimes (and per property values/datetimes) are parallel
arrays. Interpolation modes are per attribute. Temporal gaps cannot be
represented: writing a multi-track feature is refused.

The parser tolerates a trailing comma before ``]`` or ``}`` (it appears in
real-world hand-edited documents); the writer never emits one.
"""

from __future__ import annotations

import json

from .errors import CodecError
from .model import (
    Diagnostic,
    FeatureCollection,
    InterpolationMode,
    MovingFeature,
    Period,
    Severity,
    STBounds,
    TemporalGeometry,
    TemporalProperty,
    Track,
    ValueType,
    computed_bounds,
)
from . import timeutil


def strip_trailing_commas(text: str) -> tuple[str, bool]:
    """Remove commas that directly precede ] or } outside string literals."""
    out = []
    in_string = False
    escaped = False
    stripped = False
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if in_string:
            out.append(ch)
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
        elif ch == '"':
            in_string = True
            out.append(ch)
        elif ch == ",":
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            if j < n and text[j] in "]}":
                stripped = True  # drop the comma
            else:
                out.append(ch)
        else:
            out.append(ch)
        i += 1
    return "".join(out), stripped


def _parse_datetimes(raw, where: str) -> list[int]:
    times = []
    for item in raw:
        if not isinstance(item, str):
            raise CodecError("BAD_TIMESTAMP", f"{where}: datetimes must be ISO-8601 strings")
        try:
            times.append(timeutil.parse_instant(item))
        except ValueError as exc:
            raise CodecError("BAD_TIMESTAMP", f"{where}: {exc}") from None
    if any(b <= a for a, b in zip(times, times[1:])):
        raise CodecError("NON_INCREASING_DATETIMES", f"{where}: datetimes are not strictly increasing")
    return times


def _parse_interpolation(obj: dict, where: str) -> InterpolationMode:
    raw = obj.get("interpolations", "Linear")
    if not isinstance(raw, str):
        raise CodecError("UNKNOWN_INTERPOLATION", f"{where}: interpolations must be a string")
    try:
        return InterpolationMode.from_text(raw)
    except ValueError:
        raise CodecError("UNKNOWN_INTERPOLATION", f"{where}: unknown interpolation {raw!r}") from None


def _infer_value_type(values: list, where: str) -> ValueType:
    if all(isinstance(v, bool) for v in values):
        return ValueType.BOOLEAN
    if all(isinstance(v, str) for v in values):
        return ValueType.TEXT
    if all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        return ValueType.INTEGER
    if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        return ValueType.REAL
    raise CodecError("MIXED_VALUE_TYPES", f"{where}: values mix incompatible types")


def _static_text(value) -> str | None:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value) if isinstance(value, float) else str(value)
    return None


def _parse_feature(obj: dict, index: int, warnings: list[Diagnostic] | None) -> MovingFeature:
    if obj.get("type") != "MovingFeature":
        raise CodecError("BAD_DOCUMENT", f"object {index}: type is not 'MovingFeature'")
    geom_obj = obj.get("temporalGeometry")
    if not isinstance(geom_obj, dict):
        raise CodecError("BAD_DOCUMENT", f"object {index}: missing temporalGeometry")
    if geom_obj.get("type") != "MovingPoint":
        raise CodecError(
            "UNSUPPORTED_GEOMETRY_TYPE",
            f"object {index}: temporal geometry type {geom_obj.get('type')!r} is not supported",
        )
    coords = geom_obj.get("coordinates", [])
    datetimes = geom_obj.get("datetimes", [])
    if len(coords) != len(datetimes):
        raise CodecError(
            "PARALLEL_ARRAY_LENGTH_MISMATCH",
            f"object {index}: {len(coords)} coordinates vs {len(datetimes)} datetimes",
        )
    times = _parse_datetimes(datetimes, f"object {index} geometry")
    positions = []
    dims = None
    for pt in coords:
        if not isinstance(pt, list) or len(pt) not in (2, 3):
            raise CodecError("BAD_COORDINATE_ARITY", f"object {index}: coordinates must be 2D or 3D points")
        if dims is None:
            dims = len(pt)
        elif len(pt) != dims:
            raise CodecError("MIXED_DIMENSIONALITY", f"object {index}: coordinates mix 2D and 3D points")
        positions.append(tuple(float(x) for x in pt))
    mode = _parse_interpolation(geom_obj, f"object {index} geometry")
    tracks = (Track(tuple(zip(times, positions))),) if positions else ()
    geometry = TemporalGeometry(tracks, mode)

    props = []
    for p_obj in obj.get("temporalProperties", []):
        if not isinstance(p_obj, dict) or "name" not in p_obj:
            raise CodecError("BAD_DOCUMENT", f"object {index}: malformed temporal property")
        name = str(p_obj["name"])
        values = p_obj.get("values", [])
        p_times_raw = p_obj.get("datetimes", [])
        if len(values) != len(p_times_raw):
            raise CodecError(
                "PARALLEL_ARRAY_LENGTH_MISMATCH",
                f"object {index} property {name!r}: {len(values)} values vs {len(p_times_raw)} datetimes",
            )
        p_times = _parse_datetimes(p_times_raw, f"object {index} property {name!r}")
        vtype = _infer_value_type(values, f"object {index} property {name!r}")
        if vtype is ValueType.REAL:
            values = [float(v) for v in values]
        p_mode = _parse_interpolation(p_obj, f"object {index} property {name!r}")
        props.append(TemporalProperty(name, vtype, tuple(zip(p_times, values)), p_mode))

    statics = {}
    raw_props = obj.get("properties") or {}
    if not isinstance(raw_props, dict):
        raise CodecError("BAD_DOCUMENT", f"object {index}: properties must be an object")
    for key, raw in raw_props.items():
        text = _static_text(raw)
        if text is None:
            if warnings is not None:
                warnings.append(
                    Diagnostic(
                        Severity.WARNING,
                        "BAD_STATIC_PROPERTY",
                        f"object {index}: dropped non-scalar static property {key!r}",
                    )
                )
            continue
        statics[str(key)] = text

    fid = obj.get("id")
    if fid is not None:
        fid = str(fid)
    elif statics.get("name"):
        fid = statics["name"]
    else:
        fid = f"feature-{index + 1}"

    crs = obj.get("crs")
    if crs is not None and not isinstance(crs, str):
        raise CodecError("BAD_DOCUMENT", f"object {index}: crs must be a string")

    return MovingFeature(fid, geometry, tuple(props), statics, crs)


def _parse_declared_bounds(obj: dict, index: int) -> STBounds | None:
    raw = obj.get("stBoundedBy")
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise CodecError("BAD_DOCUMENT", f"object {index}: stBoundedBy must be an object")
    bbox = raw.get("bbox")
    period = raw.get("period")
    if not isinstance(bbox, list) or len(bbox) not in (4, 6):
        raise CodecError("BAD_DOCUMENT", f"object {index}: bbox must have 4 or 6 numbers")
    if not isinstance(period, dict) or "begin" not in period or "end" not in period:
        raise CodecError("BAD_DOCUMENT", f"object {index}: period needs begin and end")
    d = len(bbox) // 2
    try:
        begin = timeutil.parse_instant(str(period["begin"]))
        end = timeutil.parse_instant(str(period["end"]))
    except ValueError as exc:
        raise CodecError("BAD_TIMESTAMP", f"object {index}: {exc}") from None
    return STBounds(tuple(float(x) for x in bbox[:d]), tuple(float(x) for x in bbox[d:]), Period(begin, end))


def parse_json(doc: str, warnings: list[Diagnostic] | None = None) -> FeatureCollection:
    """Parse an MF-JSON document (single object or top-level array).

    Every feature has exactly one track: the encoding cannot express gaps.
    A feature without an "id" member falls back to its static "name"
    property, then to a positional placeholder.
    """
    cleaned, stripped = strip_trailing_commas(doc)
    if stripped and warnings is not None:
        warnings.append(
            Diagnostic(Severity.INFO, "TRAILING_COMMA", "removed trailing comma(s) before parsing")
        )
    try:
        data = json.loads(cleaned)
    except json.JSONDecodeError as exc:
        raise CodecError("INVALID_JSON", str(exc)) from None

    if isinstance(data, dict):
        objs = [data]
        single = True
    elif isinstance(data, list):
        objs = data
        single = False
    else:
        raise CodecError("BAD_DOCUMENT", "top level must be an object or an array of objects")

    features = []
    declared = []
    for i, obj in enumerate(objs):
        if not isinstance(obj, dict):
            raise CodecError("BAD_DOCUMENT", f"array item {i} is not an object")
        features.append(_parse_feature(obj, i, warnings))
        declared.append(_parse_declared_bounds(obj, i))

    bounds = None
    if single:
        bounds = declared[0]
    elif declared and all(b is not None for b in declared):
        dims = {b.dims for b in declared}
        if len(dims) == 1:
            lower = tuple(min(b.lower[i] for b in declared) for i in range(dims.pop()))
            upper = tuple(max(b.upper[i] for b in declared) for i in range(len(lower)))
            bounds = STBounds(
                lower,
                upper,
                Period(min(b.period.begin for b in declared), max(b.period.end for b in declared)),
            )
    return FeatureCollection(bounds=bounds, features=tuple(features))


def _feature_obj(f: MovingFeature) -> dict:
    sampled_tracks = [t for t in f.geometry.tracks if t.samples]
    if not sampled_tracks:
        raise CodecError("EMPTY_GEOMETRY", f"feature {f.id!r}: nothing to encode")
    if len(sampled_tracks) > 1:
        raise CodecError(
            "GAP_NOT_REPRESENTABLE",
            f"feature {f.id!r}: temporal gaps cannot be represented in the JSON encoding",
        )
    track = sampled_tracks[0]
    obj: dict = {"type": "MovingFeature"}
    if f.id != f.static_properties.get("name"):
        obj["id"] = f.id
    obj["temporalGeometry"] = {
        "type": "MovingPoint",
        "coordinates": [list(pos) for _, pos in track.samples],
        "datetimes": [timeutil.format_instant(t) for t in track.times],
        "interpolations": f.geometry.interpolation.value,
    }
    if f.temporal_properties:
        obj["temporalProperties"] = [
            {
                "name": p.name,
                "values": list(p.values),
                "datetimes": [timeutil.format_instant(t) for t in p.times],
                "interpolations": p.interpolation.value,
            }
            for p in f.temporal_properties
        ]
    feature_bounds = computed_bounds(FeatureCollection(bounds=None, features=(f,)))
    obj["stBoundedBy"] = {
        "bbox": list(feature_bounds.lower) + list(feature_bounds.upper),
        "period": {
            "begin": timeutil.format_instant(feature_bounds.period.begin),
            "end": timeutil.format_instant(feature_bounds.period.end),
        },
    }
    if f.static_properties:
        obj["properties"] = dict(f.static_properties)
    if f.crs is not None:
        obj["crs"] = f.crs
    return obj


def write_json(c: FeatureCollection) -> str:
    """Serialize a collection as MF-JSON.

    Single-feature collections become one object (the canonical form);
    anything else becomes a top-level array. Bounds are recomputed from the
    data, never copied from the collection. A feature whose id merely
    restates its static "name" omits the "id" member, matching what parsing
    would reconstruct.
    """
    objs = [_feature_obj(f) for f in c.features]
    payload = objs[0] if len(objs) == 1 else objs
    try:
        return json.dumps(payload, indent=2, allow_nan=False) + "\n"
    except ValueError as exc:
        raise CodecError("NONFINITE_VALUE", str(exc)) from None
