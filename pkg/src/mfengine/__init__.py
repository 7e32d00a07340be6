"""Moving-features engine.

Implements the OGC Moving Features data model for moving points, its three
text encodings (segment-based CSV and XML, point-based JSON), lossy-aware
transcoding between them, and the access operation set (location, speed,
acceleration, sub-trajectories, time lookup, time-to-distance curves).
"""

from .access import (
    TimeToDistanceCurve,
    VelocityVector,
    acceleration_at,
    distance_between,
    intersects_box,
    location_at,
    sub_trajectory,
    time_at_position,
    time_to_distance,
    velocity_at,
)
from .csv_codec import parse_csv, write_csv
from .errors import (
    CodecError,
    DimensionalityMismatch,
    EmptyCollection,
    EmptyIntersection,
    EngineError,
    UnsupportedInterpolation,
)
from .interpolation import (
    GAP,
    OUT_OF_RANGE,
    UNDEFINED,
    SampleResult,
    position_at,
    resample_times,
    value_at,
)
from .json_codec import parse_json, write_json
from .model import (
    Diagnostic,
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
from .transcode import Loss, TranscodeReport, transcode
from .xml_codec import parse_xml, write_xml

__version__ = "0.1.0"

__all__ = [
    "CodecError",
    "Diagnostic",
    "DimensionalityMismatch",
    "EmptyCollection",
    "EmptyIntersection",
    "EngineError",
    "FeatureCollection",
    "GAP",
    "InterpolationMode",
    "Loss",
    "MovingFeature",
    "OUT_OF_RANGE",
    "Period",
    "STBounds",
    "SampleResult",
    "Severity",
    "TemporalGeometry",
    "TemporalProperty",
    "TimeToDistanceCurve",
    "Track",
    "TranscodeReport",
    "UNDEFINED",
    "UnsupportedInterpolation",
    "ValueType",
    "VelocityVector",
    "acceleration_at",
    "computed_bounds",
    "distance_between",
    "intersects_box",
    "location_at",
    "parse_csv",
    "parse_json",
    "parse_xml",
    "position_at",
    "resample_times",
    "sub_trajectory",
    "time_at_position",
    "time_to_distance",
    "transcode",
    "validate_collection",
    "validate_feature",
    "value_at",
    "velocity_at",
    "write_csv",
    "write_json",
    "write_xml",
]
