"""Seeded random feature generators shared by the test modules.

Each generator takes a random.Random so test runs are reproducible; the
shape keyword arguments mirror what each encoding can represent (the CSV
and XML writers need linear geometry with stepwise attributes sampled on
the geometry timeline, JSON takes anything gap-free).
"""

import random
import string

from mfengine.model import (
    FeatureCollection,
    InterpolationMode,
    MovingFeature,
    TemporalGeometry,
    TemporalProperty,
    Track,
    ValueType,
)

LETTERS = string.ascii_letters + string.digits
TEXT_CHARS = LETTERS + "_ "


def rand_id(rng: random.Random) -> str:
    return "".join(rng.choice(LETTERS) for _ in range(rng.randrange(1, 9)))


def rand_text(rng: random.Random) -> str:
    return "".join(rng.choice(TEXT_CHARS) for _ in range(rng.randrange(0, 12))).strip()


def rand_value(rng: random.Random, vtype: ValueType):
    if vtype is ValueType.INTEGER:
        return rng.randrange(-(10**9), 10**9)
    if vtype is ValueType.REAL:
        return rng.uniform(-1e6, 1e6)
    if vtype is ValueType.BOOLEAN:
        return rng.random() < 0.5
    return rand_text(rng)


def rand_position(rng: random.Random, dims: int) -> tuple:
    return tuple(rng.uniform(-1000.0, 1000.0) for _ in range(dims))


def rand_times(rng: random.Random, n: int, start_ms: int | None = None) -> list[int]:
    t = start_ms if start_ms is not None else rng.randrange(-4 * 10**12, 4 * 10**12)
    times = [t]
    for _ in range(n - 1):
        t += rng.randrange(1, 60_000)
        times.append(t)
    return times


def rand_schema(rng: random.Random, max_props: int = 3) -> list[tuple[str, ValueType]]:
    return [(f"p{i}", rng.choice(list(ValueType))) for i in range(rng.randrange(0, max_props + 1))]


def segment_feature(
    rng: random.Random,
    fid: str,
    schema: list[tuple[str, ValueType]],
    dims: int,
    crs: str | None,
    allow_gaps: bool = False,
    statics: dict | None = None,
) -> MovingFeature:
    """A feature in the shape the segment-based writers reproduce exactly:

    linear geometry, stepwise attributes sampled at every geometry time,
    and no value change at a track's final instant.
    """
    n_tracks = rng.choice((1, 2)) if allow_gaps else 1
    track_times: list[list[int]] = []
    t = rng.randrange(-4 * 10**12, 4 * 10**12)
    for k in range(n_tracks):
        if k:
            t += rng.randrange(2, 300_000)  # the gap
        times = rand_times(rng, rng.randrange(2, 6), start_ms=t)
        t = times[-1]
        track_times.append(times)
    tracks = tuple(
        Track(tuple((ti, rand_position(rng, dims)) for ti in times)) for times in track_times
    )
    props = []
    for name, vtype in schema:
        # the segment encodings carry attribute values at segment starts plus
        # a repeat at the overall final instant; sample exactly there
        samples: list[tuple[int, object]] = []
        for k, times in enumerate(track_times):
            values = [rand_value(rng, vtype) for _ in times[:-1]]
            if k == len(track_times) - 1:
                values.append(values[-1])
                samples.extend(zip(times, values))
            else:
                samples.extend(zip(times[:-1], values))
        props.append(TemporalProperty(name, vtype, tuple(samples), InterpolationMode.STEPWISE))
    return MovingFeature(
        id=fid,
        geometry=TemporalGeometry(tracks, InterpolationMode.LINEAR),
        temporal_properties=tuple(props),
        static_properties=statics or {},
        crs=crs,
    )


def segment_collection(
    rng: random.Random,
    n_features: int | None = None,
    dims: int | None = None,
    allow_gaps: bool = False,
    xml_statics: bool = False,
) -> FeatureCollection:
    n_features = n_features if n_features is not None else rng.randrange(1, 4)
    dims = dims if dims is not None else rng.choice((2, 3))
    schema = rand_schema(rng)
    crs = rng.choice((None, "urn:ogc:def:crs:EPSG::4326", "urn:x-ogc:def:crs:EPSG:6.6:4326"))
    features = []
    used = set()
    for _ in range(n_features):
        fid = rand_id(rng)
        while fid in used:
            fid = rand_id(rng)
        used.add(fid)
        statics = None
        if xml_statics and rng.random() < 0.6:
            statics = {"name": rand_text(rng) or "x"}
            if rng.random() < 0.5:
                statics["description"] = rand_text(rng)
        features.append(segment_feature(rng, fid, schema, dims, crs, allow_gaps, statics))
    return FeatureCollection(bounds=None, features=tuple(features))


def json_feature(
    rng: random.Random,
    fid: str | None = None,
    dims: int | None = None,
    linear: bool = False,
    cover_props: bool = False,
) -> MovingFeature:
    """A gap-free feature using the full JSON expressiveness.

    ``linear`` forces linear geometry (for the access operations);
    ``cover_props`` pins each property's first/last sample to the geometry
    extent so the feature is also segment-encodable after resampling.
    """
    dims = dims if dims is not None else rng.choice((2, 3))
    if linear:
        geo_mode = InterpolationMode.LINEAR
    else:
        geo_mode = rng.choice(list(InterpolationMode))
    n = rng.randrange(2 if geo_mode is InterpolationMode.LINEAR else 1, 9)
    times = rand_times(rng, n)
    track = Track(tuple((t, rand_position(rng, dims)) for t in times))
    geometry = TemporalGeometry((track,), geo_mode)

    props = []
    for i in range(rng.randrange(0, 4)):
        roll = rng.random()
        if roll < 0.55:
            mode, vtype = InterpolationMode.STEPWISE, rng.choice(list(ValueType))
        elif roll < 0.85:
            mode, vtype = InterpolationMode.LINEAR, rng.choice((ValueType.INTEGER, ValueType.REAL))
        else:
            mode, vtype = InterpolationMode.DISCRETE, rng.choice(list(ValueType))
        if cover_props:
            k = rng.randrange(0, 4)
            interior = sorted(rng.sample(range(times[0] + 1, times[-1]), k)) if times[-1] - times[0] > k else []
            p_times = [times[0], *interior, times[-1]]
        else:
            k = rng.randrange(1, 6)
            p_times = rand_times(rng, k, start_ms=rng.randrange(times[0], times[-1] + 1))
        values = [rand_value(rng, vtype) for _ in p_times]
        if cover_props and mode is InterpolationMode.STEPWISE and len(values) > 1:
            values[-1] = values[-2]  # a step event at the final instant is not segment-encodable
        props.append(TemporalProperty(f"p{i}", vtype, tuple(zip(p_times, values)), mode))

    statics = {}
    if rng.random() < 0.5:
        statics["name"] = rand_text(rng) or "anon"
    if rng.random() < 0.3:
        statics["description"] = rand_text(rng)
    if rng.random() < 0.2:
        statics["operator"] = rand_text(rng)
    if fid is None:
        if statics.get("name") and rng.random() < 0.3:
            fid = statics["name"]  # exercises the id-elision rule on write
        else:
            fid = rand_id(rng)
    crs = rng.choice((None, None, "urn:ogc:def:crs:EPSG::4326"))
    return MovingFeature(fid, geometry, tuple(props), statics, crs)


def json_collection(rng: random.Random, n_features: int | None = None) -> FeatureCollection:
    n_features = n_features if n_features is not None else rng.randrange(1, 4)
    dims = rng.choice((2, 3))
    features = []
    used = set()
    for _ in range(n_features):
        f = json_feature(rng, dims=dims)
        while f.id in used:
            f = json_feature(rng, dims=dims)
        used.add(f.id)
        features.append(f)
    return FeatureCollection(bounds=None, features=tuple(features))
