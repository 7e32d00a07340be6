import random

import pytest

from mfengine import (
    CodecError,
    FeatureCollection,
    InterpolationMode,
    MovingFeature,
    Severity,
    TemporalGeometry,
    parse_csv,
    parse_xml,
    write_xml,
)

import gen
from conftest import sec


def test_parse_corpus_structure(xml_collection):
    assert len(xml_collection.features) == 1
    a = xml_collection.feature("A")
    assert len(a.geometry.tracks) == 1
    assert a.geometry.tracks[0].times == tuple(sec(o) for o in (0, 5, 10, 15, 20))
    gear = a.property_named("gear")
    assert gear.interpolation is InterpolationMode.STEPWISE
    assert [v for _, v in gear.samples] == [1, 2, 2, 3, 3]
    assert a.static_properties["name"] == "NissanA"
    assert a.static_properties["description"].startswith("Nissan Sentra")
    assert a.crs == "urn:x-ogc:def:crs:EPSG:6.6:4326"


def test_cross_codec_agreement(xml_collection, csv_collection):
    ax = xml_collection.feature("A")
    ac = csv_collection.feature("A")
    assert ax.geometry == ac.geometry
    assert ax.property_named("gear").samples == ac.property_named("gear").samples


def test_duplicate_gml_id_is_warning_not_error(xml_text):
    warnings = []
    parse_xml(xml_text, warnings=warnings)
    assert any(w.code == "DUPLICATE_GML_ID" and w.severity is Severity.WARNING for w in warnings)


def test_comma_separated_corner_tolerated(xml_collection):
    # the corpus upper corner reads "10.6, 12.2"
    assert xml_collection.bounds.upper == (10.6, 12.2)


def test_empty_foliation_yields_empty_geometry(xml_text):
    start = xml_text.index("<mf:Foliation>")
    end = xml_text.index("</mf:Foliation>") + len("</mf:Foliation>")
    doc = xml_text[:start] + "<mf:Foliation/>" + xml_text[end:]
    c = parse_xml(doc)
    a = c.feature("A")
    assert a is not None
    assert not a.geometry.has_samples
    from mfengine import validate_feature

    assert any(d.code == "EMPTY_GEOMETRY" for d in validate_feature(a))


def test_unknown_mfidref(xml_text):
    doc = xml_text.replace('mfIdRef="A" start="15"', 'mfIdRef="C" start="15"')
    with pytest.raises(CodecError) as e:
        parse_xml(doc)
    assert e.value.code == "UNKNOWN_MF_ID_REF"


def test_attr_count_mismatch(xml_text):
    doc = xml_text.replace("<mf:Attr>1</mf:Attr>", "<mf:Attr>1</mf:Attr><mf:Attr>9</mf:Attr>", 1)
    with pytest.raises(CodecError) as e:
        parse_xml(doc)
    assert e.value.code == "ATTR_COUNT_MISMATCH"


def test_bad_poslist(xml_text):
    doc = xml_text.replace("<gml:posList>10.0 10.0 10.2 10.6</gml:posList>", "<gml:posList>10.0 x</gml:posList>")
    with pytest.raises(CodecError) as e:
        parse_xml(doc)
    assert e.value.code in ("BAD_POS_LIST",)


def test_missing_stboundedby(xml_text):
    start = xml_text.index("<mf:STBoundedBy")
    end = xml_text.index("</mf:STBoundedBy>") + len("</mf:STBoundedBy>")
    doc = xml_text[:start] + xml_text[end:]
    with pytest.raises(CodecError) as e:
        parse_xml(doc)
    assert e.value.code == "MISSING_ST_BOUNDED_BY"


def test_foreign_elements_warn_and_strict_rejects(xml_text):
    doc = xml_text.replace("<mf:Foliation>", "<mf:Extension/><mf:Foliation>")
    warnings = []
    parse_xml(doc, warnings=warnings)
    assert any(w.code == "FOREIGN_ELEMENT" for w in warnings)
    with pytest.raises(CodecError) as e:
        parse_xml(doc, strict=True)
    assert e.value.code == "FOREIGN_ELEMENT"


def test_write_round_trips_corpus(xml_collection):
    out = write_xml(xml_collection)
    back = parse_xml(out)
    assert back.features == xml_collection.features
    assert back.bounds == xml_collection.bounds


def test_write_from_csv_collection(csv_collection, csv_text):
    # oracle: the CSV parse of the same scenario — 4 A-segments + 1 B-segment
    out = write_xml(csv_collection)
    assert out.count("<mf:LinearTrajectory") == 5
    assert out.count('mfIdRef="A"') == 4
    assert out.count('mfIdRef="B"') == 1
    back = parse_xml(out)
    assert back.features == csv_collection.features


def test_generated_ids_unique(csv_collection):
    import re

    out = write_xml(csv_collection)
    ids = re.findall(r'gml:id="(LT\d+)"', out)
    assert len(ids) == len(set(ids)) == 5


def test_write_rejects_stepwise_geometry(vehicle_a):
    f = MovingFeature("f", TemporalGeometry(vehicle_a.geometry.tracks, InterpolationMode.STEPWISE))
    with pytest.raises(CodecError) as e:
        write_xml(FeatureCollection(features=(f,)))
    assert e.value.code == "UNSUPPORTED_INTERPOLATION"


def test_round_trip_randomized():
    rng = random.Random(2001)
    for _ in range(120):
        c = gen.segment_collection(rng, allow_gaps=True, xml_statics=True)
        back = parse_xml(write_xml(c))
        assert back.features == c.features


def test_escaping_of_markup_in_statics():
    rng = random.Random(2002)
    c = gen.segment_collection(rng, n_features=1)
    f = c.features[0]
    spiky = MovingFeature(
        f.id, f.geometry, f.temporal_properties, {"name": '<&>"quoted"', "description": "a&b"}, f.crs
    )
    out = write_xml(FeatureCollection(features=(spiky,)))
    back = parse_xml(out)
    assert back.features[0].static_properties == spiky.static_properties


def test_write_empty_collection_headers_only(xml_text):
    c = parse_xml(xml_text)
    empty = FeatureCollection(bounds=c.bounds, features=())
    out = write_xml(empty)
    back = parse_xml(out)
    assert back.features == ()
    assert back.bounds == c.bounds
