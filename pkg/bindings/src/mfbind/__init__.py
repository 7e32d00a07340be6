"""Thin bindings over the moving-features engine for data-analysis use.

Everything here is a handle onto immutable engine values; queries delegate
1:1 to the engine (same code path, no reimplementation), so results are
numerically identical to the engine's own. Misses (outside the sampled
extent, inside a gap, off-sample under discrete interpolation) come back as
the falsy sentinels GAP / OUT_OF_RANGE / UNDEFINED rather than exceptions.

Timestamps are accepted as ISO-8601 strings or epoch milliseconds and
returned as epoch milliseconds; use ``iso(ms)`` for the text form.

    >>> import mfbind
    >>> fleet = mfbind.load("vehicles.csv")
    >>> car = fleet.get("A")
    >>> car.position_at("2011-07-14T22:00:05Z")
    (10.2, 10.6)
"""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path
from typing import Iterator, Optional

from mfengine import (
    FeatureCollection,
    InterpolationMode,
    MovingFeature,
    location_at,
    sub_trajectory,
    transcode,
    validate_collection,
    velocity_at,
)
from mfengine.cli import detect_format, parse_any
from mfengine.errors import CodecError
from mfengine.interpolation import value_at as _value_at
from mfengine.model import Severity
from mfengine.timeutil import format_instant, parse_instant

__all__ = [
    "GAP",
    "OUT_OF_RANGE",
    "UNDEFINED",
    "BindingError",
    "BoundCollection",
    "BoundFeature",
    "iso",
    "load",
    "loads",
    "save",
    "to_records",
]

__version__ = "0.1.0"


class BindingError(Exception):
    """Load/save failure; ``code`` carries the engine's diagnostic code."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class _Miss:
    """Falsy sentinel distinguishing why a query returned no value."""

    __slots__ = ("_name",)

    def __init__(self, name: str):
        self._name = name

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return self._name


GAP = _Miss("GAP")
OUT_OF_RANGE = _Miss("OUT_OF_RANGE")
UNDEFINED = _Miss("UNDEFINED")

_MISSES = {"gap": GAP, "out_of_range": OUT_OF_RANGE, "undefined": UNDEFINED}


def iso(ms: int) -> str:
    """ISO-8601 text for an epoch-millisecond instant."""
    return format_instant(ms)


def _instant(t) -> int:
    if isinstance(t, str):
        return parse_instant(t)
    return int(t)


def _unwrap(result):
    if result.is_value:
        return result.value
    return _MISSES[result.kind]


class BoundFeature:
    """Read-only handle onto one moving feature."""

    __slots__ = ("_feature",)

    def __init__(self, feature: MovingFeature):
        self._feature = feature

    @property
    def id(self) -> str:
        return self._feature.id

    @property
    def sample_times(self) -> list[int]:
        """Geometry sample timestamps, epoch milliseconds."""
        return list(self._feature.geometry.sample_times())

    @property
    def sample_times_iso(self) -> list[str]:
        return [format_instant(t) for t in self.sample_times]

    @property
    def property_names(self) -> list[str]:
        return [p.name for p in self._feature.temporal_properties]

    @property
    def static_properties(self) -> dict:
        return dict(self._feature.static_properties)

    @property
    def crs(self) -> Optional[str]:
        return self._feature.crs

    def position_at(self, t):
        """Position tuple at the instant, or a miss sentinel."""
        return _unwrap(location_at(self._feature, _instant(t)))

    def value_at(self, name: str, t):
        """Temporal-property value at the instant, or a miss sentinel."""
        prop = self._feature.property_named(name)
        if prop is None:
            raise KeyError(name)
        return _unwrap(_value_at(prop, _instant(t)))

    def speed_at(self, t):
        """Scalar speed (CRS units per second), or a miss sentinel."""
        res = velocity_at(self._feature, _instant(t))
        if res.is_value:
            return res.value.speed
        return _MISSES[res.kind]

    def velocity_at(self, t):
        res = velocity_at(self._feature, _instant(t))
        if res.is_value:
            return res.value.components
        return _MISSES[res.kind]

    def sub(self, t1, t2) -> "BoundFeature":
        """Handle onto the sub-trajectory clipped to [t1, t2]."""
        return BoundFeature(sub_trajectory(self._feature, _instant(t1), _instant(t2)))

    def to_records(self) -> list[dict]:
        return to_records(self)

    @property
    def raw(self) -> MovingFeature:
        return self._feature

    def __repr__(self) -> str:
        n = sum(len(tr.samples) for tr in self._feature.geometry.tracks)
        return f"<BoundFeature {self.id!r}: {n} samples>"


class BoundCollection(Sequence):
    """Sequence of BoundFeature handles plus the underlying collection."""

    __slots__ = ("_collection", "_features")

    def __init__(self, collection: FeatureCollection):
        self._collection = collection
        self._features = [BoundFeature(f) for f in collection.features]

    def __len__(self) -> int:
        return len(self._features)

    def __getitem__(self, index) -> BoundFeature:
        return self._features[index]

    def __iter__(self) -> Iterator[BoundFeature]:
        return iter(self._features)

    @property
    def ids(self) -> list[str]:
        return [f.id for f in self._features]

    def get(self, feature_id: str) -> Optional[BoundFeature]:
        for f in self._features:
            if f.id == feature_id:
                return f
        return None

    @property
    def raw(self) -> FeatureCollection:
        return self._collection

    def __repr__(self) -> str:
        return f"<BoundCollection {self.ids!r}>"


def loads(text: str, format: str = "auto") -> BoundCollection:
    """Parse document text (CSV, XML or JSON; detected from content by default)."""
    try:
        if format == "auto":
            format = detect_format("", text)
        collection = parse_any(text, format)
    except CodecError as exc:
        raise BindingError(exc.code, exc.message) from None
    hard = [d for d in validate_collection(collection) if d.severity is Severity.ERROR]
    if hard:
        raise BindingError(hard[0].code, hard[0].message)
    return BoundCollection(collection)


def load(source, format: str = "auto") -> BoundCollection:
    """Load a document from a path (or raw document text).

    Strings that name an existing file are read from disk; anything else is
    treated as document text.
    """
    if isinstance(source, Path):
        return loads(source.read_text(encoding="utf-8"), format)
    if isinstance(source, str):
        looks_like_path = "\n" not in source and len(source) < 4096
        if looks_like_path and Path(source).is_file():
            return loads(Path(source).read_text(encoding="utf-8"), format)
        return loads(source, format)
    raise TypeError(f"cannot load from {type(source).__name__}")


def save(collection, format: str, path=None, strict: bool = False) -> str:
    """Serialize to the target format, converting representation as needed.

    Runs the engine's transcoder, so the same loss rules apply; a refused
    conversion raises BindingError with the first loss code. Returns the
    document text and, when ``path`` is given, also writes it there.
    """
    raw = collection.raw if isinstance(collection, BoundCollection) else collection
    doc, report = transcode(raw, format, strict=strict)
    if doc is None:
        first = next(l for l in report.losses if l.severity is Severity.ERROR)
        raise BindingError(first.code, first.message)
    if path is not None:
        Path(path).write_text(doc, encoding="utf-8")
    return doc


def to_records(feature: BoundFeature) -> list[dict]:
    """Flat per-sample records for dataframe ingestion.

    One record per geometry sample: feature id, timestamp (epoch ms and
    ISO), one column per coordinate axis, and every temporal property
    evaluated at that instant (None where undefined).
    """
    raw = feature.raw if isinstance(feature, BoundFeature) else feature
    axes = "xyz"
    records = []
    for t, pos in raw.geometry.iter_samples():
        rec = {"id": raw.id, "t": t, "iso": format_instant(t)}
        for i, c in enumerate(pos):
            rec[axes[i]] = c
        for p in raw.temporal_properties:
            res = _value_at(p, t)
            rec[p.name] = res.value if res.is_value else None
        records.append(rec)
    return records
