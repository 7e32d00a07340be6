"""Segment-based XML/GML encoding of moving features.

Document shape::

    <mf:MovingFeatures>
      <mf:STBoundedBy offset="sec"> <gml:EnvelopeWithTimePeriod srsName=...>
        lowerCorner / upperCorner / beginPosition / endPosition
      <mf:Member> <mf:MovingFeature gml:id=...> gml:name? gml:description?
      <mf:Header> <mf:VaryingAttrDefs> <mf:attrDef name=... type=...>
      <mf:Foliation> <mf:LinearTrajectory gml:id=... mfIdRef=... start=... end=...>
        <gml:posList>...</gml:posList> <mf:Attr>...</mf:Attr> ...

Parsing matches elements and attributes by local name, so documents with
unusual namespace prefixes or URIs still load; unknown elements are skipped
with a warning (or rejected in strict mode). No schema validation is
performed, structural checks only.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .errors import CodecError
from .model import (
    Diagnostic,
    FeatureCollection,
    Period,
    Severity,
    STBounds,
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

MF_NS = "http://schemas.opengis.net/mf-core/1.0"
GML_NS = "http://www.opengis.net/gml/3.2"

ET.register_namespace("mf", MF_NS)
ET.register_namespace("gml", GML_NS)

_KNOWN = {
    "MovingFeatures", "STBoundedBy", "EnvelopeWithTimePeriod", "lowerCorner",
    "upperCorner", "beginPosition", "endPosition", "Member", "MovingFeature",
    "name", "description", "Header", "VaryingAttrDefs", "attrDef",
    "AttrAnnotation", "Foliation", "LinearTrajectory", "posList", "Attr",
}


def _local(node) -> str | None:
    """Local name of an element or raw tag; None for comments and PIs."""
    tag = getattr(node, "tag", node)
    if not isinstance(tag, str):
        return None
    return tag.split("}")[-1]


def _attr(el: ET.Element, local: str) -> str | None:
    for key, val in el.attrib.items():
        if key.split("}")[-1] == local:
            return val
    return None


def _child(el: ET.Element, local: str) -> ET.Element | None:
    for ch in el:
        if _local(ch) == local:
            return ch
    return None


def _note_foreign(el: ET.Element, strict: bool, warnings: list[Diagnostic] | None) -> None:
    local = _local(el)
    if local is None or local in _KNOWN:
        return
    if strict:
        raise CodecError("FOREIGN_ELEMENT", f"unexpected element {local!r}")
    if warnings is not None:
        warnings.append(Diagnostic(Severity.WARNING, "FOREIGN_ELEMENT", f"skipped element {local!r}"))


def _parse_bounds(el: ET.Element) -> tuple[STBounds, str | None, int]:
    unit = (_attr(el, "offset") or "sec").strip()
    try:
        unit_ms = timeutil.unit_millis(unit)
    except ValueError:
        raise CodecError("UNKNOWN_TIME_UNIT", f"unknown time unit {unit!r}") from None
    env = _child(el, "EnvelopeWithTimePeriod")
    if env is None:
        raise CodecError("MISSING_ST_BOUNDED_BY", "STBoundedBy has no EnvelopeWithTimePeriod")
    srs = _attr(env, "srsName")
    parts = {}
    for name in ("lowerCorner", "upperCorner", "beginPosition", "endPosition"):
        ch = _child(env, name)
        if ch is None or ch.text is None:
            raise CodecError("MISSING_ST_BOUNDED_BY", f"envelope lacks {name}")
        parts[name] = ch.text
    lower = parse_floats(parts["lowerCorner"])
    upper = parse_floats(parts["upperCorner"])
    if len(lower) != len(upper) or len(lower) not in (2, 3):
        raise CodecError("MISSING_ST_BOUNDED_BY", "envelope corners are malformed")
    try:
        begin = timeutil.parse_instant(parts["beginPosition"])
        end = timeutil.parse_instant(parts["endPosition"])
    except ValueError as exc:
        raise CodecError("BAD_TIMESTAMP", f"bad envelope timestamp: {exc}") from None
    return STBounds(tuple(lower), tuple(upper), Period(begin, end), unit), srs, unit_ms


def parse_xml(doc: str, strict: bool = False, warnings: list[Diagnostic] | None = None) -> FeatureCollection:
    """Parse an MF-XML document into a feature collection.

    Trajectory elements are grouped by mfIdRef and chained into tracks
    exactly like CSV segments; Attr children map positionally onto the
    declared attrDefs. gml:name/gml:description become static properties.
    Duplicate trajectory gml:id values are reported as a warning, not an
    error.
    """
    try:
        root = ET.fromstring(doc)
    except ET.ParseError as exc:
        raise CodecError("INVALID_XML", str(exc)) from None
    if _local(root.tag) != "MovingFeatures":
        raise CodecError("INVALID_XML", f"root element is {_local(root.tag)!r}, not MovingFeatures")

    bounds = None
    srs = None
    unit_ms = 1000
    members: dict[str, dict] = {}
    attr_defs: list[AttrDef] = []
    trajectories: list[ET.Element] = []

    for section in root:
        local = _local(section)
        if local == "STBoundedBy":
            bounds, srs, unit_ms = _parse_bounds(section)
        elif local == "Member":
            for el in section:
                if _local(el) != "MovingFeature":
                    _note_foreign(el, strict, warnings)
                    continue
                fid = _attr(el, "id") or ""
                statics = {}
                for ch in el:
                    ch_local = _local(ch)
                    if ch_local in ("name", "description"):
                        statics[ch_local] = ch.text or ""
                    else:
                        _note_foreign(ch, strict, warnings)
                members[fid] = statics
        elif local == "Header":
            defs = _child(section, "VaryingAttrDefs")
            for el in defs if defs is not None else ():
                if _local(el) != "attrDef":
                    _note_foreign(el, strict, warnings)
                    continue
                name = _attr(el, "name") or ""
                xsd = (_attr(el, "type") or "").strip()
                if xsd not in XSD_TO_TYPE:
                    raise CodecError("UNKNOWN_COLUMN_TYPE", f"unknown attribute type {xsd!r}")
                attr_defs.append((name, XSD_TO_TYPE[xsd]))
        elif local == "Foliation":
            for el in section:
                if _local(el) != "LinearTrajectory":
                    _note_foreign(el, strict, warnings)
                    continue
                trajectories.append(el)
        else:
            _note_foreign(section, strict, warnings)

    if bounds is None:
        raise CodecError("MISSING_ST_BOUNDED_BY", "document has no mf:STBoundedBy")

    base = bounds.period.begin
    seen_ids = set()
    rows_by_feature: dict[str, list[SegmentRow]] = {}
    for el in trajectories:
        gid = _attr(el, "id")
        if gid is not None:
            if gid in seen_ids and warnings is not None:
                warnings.append(
                    Diagnostic(Severity.WARNING, "DUPLICATE_GML_ID", f"duplicate trajectory id {gid!r}")
                )
            seen_ids.add(gid)
        mfid = _attr(el, "mfIdRef")
        if mfid is None or mfid not in members:
            raise CodecError("UNKNOWN_MF_ID_REF", f"trajectory references undeclared feature {mfid!r}")
        try:
            start = timeutil.parse_time_value(_attr(el, "start") or "", base, unit_ms)
            end = timeutil.parse_time_value(_attr(el, "end") or "", base, unit_ms)
        except ValueError as exc:
            raise CodecError("BAD_TIMESTAMP", f"trajectory {gid!r}: {exc}") from None
        pos_el = _child(el, "posList")
        if pos_el is None or not (pos_el.text or "").strip():
            raise CodecError("BAD_POS_LIST", f"trajectory {gid!r} has no posList")
        coords = parse_floats(pos_el.text)
        dims = bounds.dims
        if len(coords) % dims != 0 or len(coords) < 2 * dims:
            raise CodecError(
                "BAD_POS_LIST",
                f"trajectory {gid!r}: {len(coords)} values do not form >=2 {dims}D points",
            )
        points = tuple(tuple(coords[i : i + dims]) for i in range(0, len(coords), dims))
        attr_els = [ch for ch in el if _local(ch) == "Attr"]
        if len(attr_els) != len(attr_defs):
            raise CodecError(
                "ATTR_COUNT_MISMATCH",
                f"trajectory {gid!r}: {len(attr_els)} Attr values for {len(attr_defs)} attrDefs",
            )
        values = tuple(
            parse_scalar(ch.text or "", attr_defs[k][1]) for k, ch in enumerate(attr_els)
        )
        rows_by_feature.setdefault(mfid, []).append(SegmentRow(mfid, start, end, points, values))

    features = []
    for fid, statics in members.items():
        rows = rows_by_feature.get(fid, [])
        f = build_feature(fid, rows, attr_defs, srs, statics)
        features.append(f)
    return FeatureCollection(bounds=bounds, features=tuple(features))


def _mf(tag: str) -> str:
    return f"{{{MF_NS}}}{tag}"


def _gml(tag: str) -> str:
    return f"{{{GML_NS}}}{tag}"


def write_xml(c: FeatureCollection) -> str:
    """Serialize a collection as MF-XML.

    Same representability rules as CSV (linear geometry, stepwise shared
    attribute columns); additionally keeps static name/description per
    feature. Generated trajectory gml:id values are unique within the
    document.
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

    segments = [seg for f in c.features for seg in feature_segments(f)]
    base = bounds.period.begin
    unit = bounds.time_unit
    unit_ms = timeutil.unit_millis(unit)
    deltas = [t - base for seg in segments for t in (seg.start_ms, seg.end_ms)]
    if not all(timeutil.offset_is_exact(d, unit_ms) for d in deltas):
        unit, unit_ms = "sec", 1000
    crs = next((f.crs for f in c.features if f.crs), None)

    root = ET.Element(_mf("MovingFeatures"))
    stb = ET.SubElement(root, _mf("STBoundedBy"), {"offset": unit})
    env = ET.SubElement(stb, _gml("EnvelopeWithTimePeriod"))
    if crs:
        env.set("srsName", crs)
    ET.SubElement(env, _gml("lowerCorner")).text = " ".join(repr(x) for x in bounds.lower)
    ET.SubElement(env, _gml("upperCorner")).text = " ".join(repr(x) for x in bounds.upper)
    ET.SubElement(env, _gml("beginPosition")).text = timeutil.format_instant(bounds.period.begin)
    ET.SubElement(env, _gml("endPosition")).text = timeutil.format_instant(bounds.period.end)

    for f in c.features:
        member = ET.SubElement(root, _mf("Member"))
        feature_el = ET.SubElement(member, _mf("MovingFeature"), {_gml("id"): f.id})
        for key in ("name", "description"):
            if key in f.static_properties:
                ET.SubElement(feature_el, _gml(key)).text = f.static_properties[key]

    if attr_defs:
        header = ET.SubElement(root, _mf("Header"))
        defs = ET.SubElement(header, _mf("VaryingAttrDefs"))
        for name, vtype in attr_defs:
            ET.SubElement(defs, _mf("attrDef"), {"name": name, "type": TYPE_TO_XSD[vtype]})

    foliation = ET.SubElement(root, _mf("Foliation"))
    for n, seg in enumerate(segments, start=1):
        traj = ET.SubElement(
            foliation,
            _mf("LinearTrajectory"),
            {
                _gml("id"): f"LT{n:04d}",
                "mfIdRef": seg.feature_id,
                "start": timeutil.format_offset(seg.start_ms - base, unit_ms),
                "end": timeutil.format_offset(seg.end_ms - base, unit_ms),
            },
        )
        ET.SubElement(traj, _gml("posList")).text = " ".join(
            repr(x) for p in (seg.start_pos, seg.end_pos) for x in p
        )
        for k, v in enumerate(seg.attr_values):
            ET.SubElement(traj, _mf("Attr")).text = format_scalar(v, attr_defs[k][1])

    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"
