"""Conversion between the three encodings through the in-memory model.

The encodings have different expressive power, so conversion can lose
information: gaps cannot enter JSON's point-based layout, the segment-based
layouts force one stepwise timeline per attribute synced to the geometry,
and CSV cannot carry static properties at all. Every conversion therefore
returns a report listing what was lost or rejected. With ``strict=True`` a
conversion that would lose information (WARNING-level losses) is refused
outright.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CodecError
from .csv_codec import write_csv
from .interpolation import track_resample_times, value_at
from .json_codec import write_json
from .model import (
    FeatureCollection,
    InterpolationMode,
    MovingFeature,
    Severity,
    TemporalProperty,
)
from .xml_codec import write_xml

CSV, XML, JSON = "csv", "xml", "json"

GAP_NOT_REPRESENTABLE = "GAP_NOT_REPRESENTABLE"
PER_ATTR_INTERPOLATION_COLLAPSED = "PER_ATTR_INTERPOLATION_COLLAPSED"
STATIC_PROPS_DROPPED = "STATIC_PROPS_DROPPED"
ATTR_RESAMPLED = "ATTR_RESAMPLED"
ATTR_SAMPLES_DROPPED = "ATTR_SAMPLES_DROPPED"
ATTR_CHANGE_UNREPRESENTABLE = "ATTR_CHANGE_UNREPRESENTABLE"
ATTR_NOT_COVERING = "ATTR_NOT_COVERING"
INTERPOLATION_UNSUPPORTED = "INTERPOLATION_UNSUPPORTED"
EMPTY_GEOMETRY = "EMPTY_GEOMETRY"


@dataclass(frozen=True)
class Loss:
    code: str
    severity: Severity
    message: str

    def __str__(self) -> str:
        return f"{self.severity.value} {self.code} {self.message}"


@dataclass(frozen=True)
class TranscodeReport:
    losses: tuple[Loss, ...] = ()

    @property
    def has_errors(self) -> bool:
        return any(l.severity is Severity.ERROR for l in self.losses)

    @property
    def has_warnings(self) -> bool:
        return any(l.severity is Severity.WARNING for l in self.losses)

    def codes(self) -> set[str]:
        return {l.code for l in self.losses}


def _prepare_segmented_feature(f: MovingFeature, target: str, losses: list[Loss]) -> MovingFeature | None:
    """Rewrite a feature into the shape the segment-based writers accept.

    Attributes are resampled onto the segment-boundary timeline exactly as a
    reparse of the written document would reconstruct them, so values at
    retained sample instants are preserved bit-for-bit even where the
    interpolation tag degrades to stepwise.
    """
    geom = f.geometry
    if not geom.has_samples:
        losses.append(Loss(EMPTY_GEOMETRY, Severity.ERROR, f"feature {f.id!r} has no samples"))
        return None
    if geom.interpolation is not InterpolationMode.LINEAR:
        losses.append(
            Loss(
                INTERPOLATION_UNSUPPORTED,
                Severity.ERROR,
                f"feature {f.id!r}: {target.upper()} supports only linear geometry, "
                f"got {geom.interpolation.value.lower()}",
            )
        )
        return None

    tracks = [t for t in geom.tracks if t.samples]
    spans = [(t.first_time, t.last_time) for t in tracks]
    track_boundaries = [track_resample_times(t, list(f.temporal_properties)) for t in tracks]
    starts = [t for bts in track_boundaries for t in bts[:-1]]
    final_time = track_boundaries[-1][-1]

    def prepare_prop(p: TemporalProperty) -> TemporalProperty | None:
        label = f"feature {f.id!r} attribute {p.name!r}"
        if p.interpolation is InterpolationMode.DISCRETE:
            losses.append(
                Loss(
                    INTERPOLATION_UNSUPPORTED,
                    Severity.ERROR,
                    f"{label}: discrete attributes cannot fill every segment",
                )
            )
            return None
        if not p.samples or p.times[0] > geom.first_time or p.times[-1] < geom.last_time:
            losses.append(
                Loss(
                    ATTR_NOT_COVERING,
                    Severity.ERROR,
                    f"{label}: values do not cover the geometry's temporal extent",
                )
            )
            return None
        if p.interpolation is InterpolationMode.STEPWISE:
            for bts in track_boundaries:
                # a step event at a track's final instant has no following
                # segment start to carry it and would be dropped silently
                if value_at(p, bts[-1]).value != value_at(p, bts[-2]).value:
                    losses.append(
                        Loss(
                            ATTR_CHANGE_UNREPRESENTABLE,
                            Severity.ERROR,
                            f"{label}: value changes at the final instant t={bts[-1]} of a track",
                        )
                    )
                    return None
        # the written document repeats the last segment's value at the final
        # instant; mirror that so the prepared feature reparses identically
        reconstructed = [(t, value_at(p, t).value) for t in starts] + [
            (final_time, value_at(p, track_boundaries[-1][-2]).value)
        ]
        dropped_outside = False
        for t, v in p.samples:
            if any(a <= t <= b for a, b in spans):
                continue
            if t < spans[0][0] or t > spans[-1][1]:
                dropped_outside = True
                continue
            held = next((rv for rt, rv in reversed(reconstructed) if rt <= t), None)
            if held != v:
                losses.append(
                    Loss(
                        ATTR_CHANGE_UNREPRESENTABLE,
                        Severity.ERROR,
                        f"{label}: value changes inside a temporal gap at t={t}",
                    )
                )
                return None
        if dropped_outside:
            losses.append(
                Loss(
                    ATTR_SAMPLES_DROPPED,
                    Severity.WARNING,
                    f"{label}: samples outside the geometry's extent were dropped",
                )
            )
        if p.interpolation is not InterpolationMode.STEPWISE:
            losses.append(
                Loss(
                    PER_ATTR_INTERPOLATION_COLLAPSED,
                    Severity.WARNING,
                    f"{label}: {p.interpolation.value.lower()} interpolation collapses to "
                    "the shared stepwise timeline",
                )
            )
        if tuple(reconstructed) != p.samples:
            losses.append(
                Loss(ATTR_RESAMPLED, Severity.INFO, f"{label}: resampled onto the segment boundaries")
            )
        return TemporalProperty(p.name, p.value_type, tuple(reconstructed), InterpolationMode.STEPWISE)

    new_props = [prepare_prop(p) for p in f.temporal_properties]
    if any(p is None for p in new_props):
        return None

    statics = dict(f.static_properties)
    if target == CSV and statics:
        losses.append(
            Loss(
                STATIC_PROPS_DROPPED,
                Severity.WARNING,
                f"feature {f.id!r}: static properties {sorted(statics)} are not representable in CSV",
            )
        )
        statics = {}
    elif target == XML:
        extra = sorted(k for k in statics if k not in ("name", "description"))
        if extra:
            losses.append(
                Loss(
                    STATIC_PROPS_DROPPED,
                    Severity.WARNING,
                    f"feature {f.id!r}: static properties {extra} beyond name/description "
                    "are not representable in XML",
                )
            )
            statics = {k: v for k, v in statics.items() if k in ("name", "description")}

    return MovingFeature(f.id, geom, tuple(new_props), statics, f.crs)


def _prepare_json_feature(f: MovingFeature, losses: list[Loss]) -> MovingFeature | None:
    sampled = [t for t in f.geometry.tracks if t.samples]
    if not sampled:
        losses.append(Loss(EMPTY_GEOMETRY, Severity.ERROR, f"feature {f.id!r} has no samples"))
        return None
    if len(sampled) > 1:
        losses.append(
            Loss(
                GAP_NOT_REPRESENTABLE,
                Severity.ERROR,
                f"feature {f.id!r}: temporal gaps cannot be represented in JSON",
            )
        )
        return None
    return f


def transcode(c: FeatureCollection, target: str, strict: bool = False) -> tuple[str | None, TranscodeReport]:
    """Convert a collection to the target encoding ("csv", "xml" or "json").

    Returns (document text, report). On refusal the document is None and the
    report contains at least one ERROR-level loss; with ``strict=True`` any
    WARNING-level loss is escalated to a refusal as well.
    """
    target = target.lower()
    if target not in (CSV, XML, JSON):
        raise ValueError(f"unknown target format {target!r}")

    losses: list[Loss] = []
    prepared: list[MovingFeature] = []
    for f in c.features:
        if target == JSON:
            pf = _prepare_json_feature(f, losses)
        else:
            pf = _prepare_segmented_feature(f, target, losses)
        if pf is not None:
            prepared.append(pf)

    def refusal() -> tuple[None, TranscodeReport]:
        escalated = tuple(
            Loss(l.code, Severity.ERROR, l.message) if l.severity is Severity.WARNING else l
            for l in losses
        )
        return None, TranscodeReport(escalated)

    if any(l.severity is Severity.ERROR for l in losses):
        return None, TranscodeReport(tuple(losses))
    if strict and any(l.severity is Severity.WARNING for l in losses):
        return refusal()

    out = FeatureCollection(bounds=c.bounds, features=tuple(prepared))
    writer = {CSV: write_csv, XML: write_xml, JSON: write_json}[target]
    try:
        doc = writer(out)
    except CodecError as exc:
        losses.append(Loss(exc.code, Severity.ERROR, exc.message))
        return None, TranscodeReport(tuple(losses))
    return doc, TranscodeReport(tuple(losses))
