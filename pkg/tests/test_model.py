import random

import pytest

from mfengine import (
    EmptyCollection,
    FeatureCollection,
    InterpolationMode,
    MovingFeature,
    Period,
    STBounds,
    Severity,
    TemporalGeometry,
    TemporalProperty,
    Track,
    ValueType,
    computed_bounds,
    validate_collection,
    validate_feature,
)

import gen
from conftest import sec


def make_feature(samples, mode=InterpolationMode.LINEAR, fid="f"):
    return MovingFeature(fid, TemporalGeometry((Track(tuple(samples)),), mode))


def errors_of(diags):
    return [d for d in diags if d.severity is Severity.ERROR]


def test_vehicle_a_is_clean(vehicle_a):
    assert validate_feature(vehicle_a) == []


def test_identical_timestamps_rejected():
    f = make_feature([(0, (0.0, 0.0)), (0, (1.0, 1.0))])
    codes = {d.code for d in errors_of(validate_feature(f))}
    assert "NON_INCREASING_TIMESTAMPS" in codes


def test_linear_track_needs_two_samples():
    f = make_feature([(0, (0.0, 0.0))])
    codes = {d.code for d in errors_of(validate_feature(f))}
    assert "LINEAR_TRACK_TOO_SHORT" in codes
    # the same single sample is legal under stepwise interpolation
    g = make_feature([(0, (0.0, 0.0))], InterpolationMode.STEPWISE)
    assert errors_of(validate_feature(g)) == []


def test_zero_duration_is_warning_not_error():
    f = make_feature([(5, (0.0, 0.0))], InterpolationMode.DISCRETE)
    diags = validate_feature(f)
    assert errors_of(diags) == []
    assert any(d.code == "ZERO_DURATION" for d in diags)


def test_empty_geometry_is_error():
    f = MovingFeature("f", TemporalGeometry((), InterpolationMode.LINEAR))
    assert any(d.code == "EMPTY_GEOMETRY" for d in errors_of(validate_feature(f)))


def test_nonfinite_coordinate_is_error():
    f = make_feature([(0, (0.0, 0.0)), (1, (float("inf"), 1.0))])
    assert any(d.code == "NONFINITE_COORDINATE" for d in errors_of(validate_feature(f)))


def test_linear_text_property_is_error():
    prop = TemporalProperty("label", ValueType.TEXT, ((0, "a"), (1, "b")), InterpolationMode.LINEAR)
    f = MovingFeature(
        "f",
        TemporalGeometry((Track(((0, (0.0, 0.0)), (1, (1.0, 1.0)))),), InterpolationMode.LINEAR),
        (prop,),
    )
    assert any(d.code == "LINEAR_NON_NUMERIC" for d in errors_of(validate_feature(f)))


def test_overlapping_tracks_rejected():
    g = TemporalGeometry(
        (
            Track(((0, (0.0, 0.0)), (10, (1.0, 1.0)))),
            Track(((5, (2.0, 2.0)), (15, (3.0, 3.0)))),
        ),
        InterpolationMode.LINEAR,
    )
    f = MovingFeature("f", g)
    assert any(d.code == "TRACKS_OVERLAP" for d in errors_of(validate_feature(f)))


def test_collection_bounds_warning_from_corpus(csv_collection):
    # B's positions lie outside the declared lower corner
    diags = validate_collection(csv_collection)
    assert errors_of(diags) == []
    assert any(d.code == "BOUNDS_NOT_COVERING" for d in diags)


def test_declared_period_end_beyond_data(json_collection):
    diags = validate_collection(json_collection)
    assert errors_of(diags) == []
    assert any(
        d.code == "BOUNDS_NOT_TIGHT" and "period end beyond data" in d.message for d in diags
    )


def test_empty_collection_validates_clean():
    assert validate_collection(FeatureCollection()) == []


def test_duplicate_feature_ids():
    f1 = make_feature([(0, (0.0, 0.0)), (1, (1.0, 1.0))], fid="A")
    f2 = make_feature([(2, (0.0, 0.0)), (3, (1.0, 1.0))], fid="A")
    diags = validate_collection(FeatureCollection(features=(f1, f2)))
    assert any(d.code == "DUPLICATE_FEATURE_ID" for d in errors_of(diags))


def test_computed_bounds_single_vehicle(json_collection):
    c = FeatureCollection(features=json_collection.features)
    b = computed_bounds(c)
    assert b.lower == (10.0, 10.0)
    assert b.upper == (10.6, 12.2)
    assert b.period == Period(sec(0), sec(20))


def test_computed_bounds_both_vehicles(csv_collection):
    # oracle: min/max over the raw vertex table of the corpus rows
    vertices = [
        (10.0, 10.0), (10.2, 10.6), (10.4, 11.2), (10.5, 11.7), (10.6, 12.2),
        (2.0, 2.0), (2.1, 2.1),
    ]
    lo = (min(v[0] for v in vertices), min(v[1] for v in vertices))
    hi = (max(v[0] for v in vertices), max(v[1] for v in vertices))
    b = computed_bounds(csv_collection)
    assert b.lower == lo == (2.0, 2.0)
    assert b.upper == hi == (10.6, 12.2)


def test_computed_bounds_degenerate_single_sample():
    f = make_feature([(7, (1.5, 2.5))], InterpolationMode.DISCRETE)
    b = computed_bounds(FeatureCollection(features=(f,)))
    assert b.lower == b.upper == (1.5, 2.5)
    assert b.period.begin == b.period.end == 7


def test_computed_bounds_empty_raises():
    with pytest.raises(EmptyCollection):
        computed_bounds(FeatureCollection())


def test_computed_bounds_monotone_and_containing():
    rng = random.Random(20110714)
    for _ in range(50):
        c = gen.json_collection(rng)
        b = computed_bounds(c)
        for f in c.features:
            for t, pos in f.geometry.iter_samples():
                assert b.period.contains(t)
                assert b.contains_position(pos)
        grown = FeatureCollection(features=c.features + gen.segment_collection(rng, dims=c.features[0].geometry.dims).features)
        gb = computed_bounds(grown)
        assert all(gb.lower[i] <= b.lower[i] for i in range(b.dims))
        assert all(gb.upper[i] >= b.upper[i] for i in range(b.dims))
        assert gb.period.begin <= b.period.begin and gb.period.end >= b.period.end


def test_random_features_validate_clean():
    rng = random.Random(42)
    for _ in range(100):
        c = gen.json_collection(rng)
        assert errors_of(validate_collection(c)) == []
        s = gen.segment_collection(rng, allow_gaps=True)
        assert errors_of(validate_collection(s)) == []
