"""Command-line front end: validate, convert, query, info, export-wkt.

Exit codes: 0 success, 1 domain failure (ERROR diagnostics, unknown feature,
refused conversion, unsupported export), 2 parse or I/O failure. Diagnostics
and conversion reports go to standard error; results go to standard output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import timeutil
from .access import (
    acceleration_at,
    distance_between,
    location_at,
    time_to_distance,
    velocity_at,
)
from .csv_codec import parse_csv
from .errors import CodecError, EngineError
from .interpolation import value_at
from .json_codec import parse_json
from .model import (
    Diagnostic,
    FeatureCollection,
    InterpolationMode,
    Severity,
    ValueType,
    computed_bounds,
    validate_collection,
)
from .transcode import transcode
from .xml_codec import parse_xml

FORMATS = ("csv", "xml", "json")


def detect_format(path: str, text: str) -> str:
    if path and path != "-":
        suffix = Path(path).suffix.lower().lstrip(".")
        if suffix in FORMATS:
            return suffix
    head = text.lstrip()[:1]
    if head == "@":
        return "csv"
    if head == "<":
        return "xml"
    if head in ("{", "["):
        return "json"
    raise CodecError("UNKNOWN_FORMAT", "cannot detect input format from extension or content")


def read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def parse_any(text: str, fmt: str, warnings: list[Diagnostic] | None = None) -> FeatureCollection:
    if fmt == "csv":
        return parse_csv(text, warnings=warnings)
    if fmt == "xml":
        return parse_xml(text, warnings=warnings)
    return parse_json(text, warnings=warnings)


def load_collection(path: str, fmt: str = "auto") -> tuple[FeatureCollection, list[Diagnostic]]:
    text = read_input(path)
    if fmt == "auto":
        fmt = detect_format(path, text)
    warnings: list[Diagnostic] = []
    return parse_any(text, fmt, warnings), warnings


def fmt7(x: float) -> str:
    """Shortest form at 7 significant decimal digits."""
    return format(float(x), ".7g")


def fmt_wkt(x: float) -> str:
    return str(int(x)) if x == int(x) else repr(x)


def parse_at(text: str, c: FeatureCollection) -> int:
    if timeutil.is_numeric(text):
        bounds = c.bounds if c.bounds is not None else computed_bounds(c)
        return bounds.period.begin + timeutil.parse_offset(text, timeutil.unit_millis(bounds.time_unit))
    return timeutil.parse_instant(text)


def cmd_validate(args) -> int:
    c, diagnostics = load_collection(args.input, args.format)
    diagnostics.extend(validate_collection(c))
    for d in diagnostics:
        print(d, file=sys.stderr)
    return 1 if any(d.severity is Severity.ERROR for d in diagnostics) else 0


def cmd_convert(args) -> int:
    c, _ = load_collection(args.input)
    doc, report = transcode(c, args.format, strict=args.strict)
    for loss in report.losses:
        print(loss, file=sys.stderr)
    if doc is None:
        return 1
    if args.output and args.output != "-":
        Path(args.output).write_text(doc, encoding="utf-8")
    else:
        sys.stdout.write(doc)
    return 0


def format_value(v, vtype: ValueType | None) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt7(v)
    return str(v)


def cmd_query(args) -> int:
    c, _ = load_collection(args.input, args.format)
    ids = args.feature or []
    if not ids:
        print("ERROR MISSING_FEATURE --feature is required", file=sys.stderr)
        return 2
    features = []
    for fid in ids:
        f = c.feature(fid)
        if f is None:
            print(f"ERROR UNKNOWN_FEATURE no feature with id {fid!r}", file=sys.stderr)
            return 1
        features.append(f)
    f = features[0]
    t = parse_at(args.at, c)

    what = args.what
    if what == "position":
        res = location_at(f, t)
        raw = list(res.value) if res.is_value else None
        text = " ".join(fmt7(x) for x in res.value) if res.is_value else res.token
    elif what == "velocity":
        res = velocity_at(f, t)
        raw = list(res.value.components) if res.is_value else None
        text = " ".join(fmt7(x) for x in res.value.components) if res.is_value else res.token
    elif what == "speed":
        res = velocity_at(f, t)
        raw = res.value.speed if res.is_value else None
        text = fmt7(res.value.speed) if res.is_value else res.token
    elif what == "acceleration":
        res = acceleration_at(f, t)
        raw = list(res.value) if res.is_value else None
        text = " ".join(fmt7(x) for x in res.value) if res.is_value else res.token
    elif what == "distance":
        if len(features) != 2:
            print("ERROR MISSING_FEATURE distance needs --feature twice", file=sys.stderr)
            return 2
        res = distance_between(features[0], features[1], t)
        raw = res.value if res.is_value else None
        text = fmt7(res.value) if res.is_value else res.token
    else:
        prop = f.property_named(what)
        if prop is None:
            print(f"ERROR UNKNOWN_PROPERTY feature {f.id!r} has no property {what!r}", file=sys.stderr)
            return 2
        res = value_at(prop, t)
        raw = res.value if res.is_value else None
        text = format_value(res.value, prop.value_type) if res.is_value else res.token

    if args.output == "json":
        payload = {"feature": f.id, "at": t, "what": what, "result": res.kind, "value": raw}
        print(json.dumps(payload))
    elif args.output and args.output != "-":
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_info(args) -> int:
    c, _ = load_collection(args.input, args.format)
    print(f"features: {len(c.features)}")
    for f in c.features:
        g = f.geometry
        n = sum(len(t.samples) for t in g.tracks)
        tracks = sum(1 for t in g.tracks if t.samples)
        if n:
            duration = timeutil.format_offset(g.last_time - g.first_time, 1000)
        else:
            duration = "0"
        if g.interpolation is InterpolationMode.LINEAR and n:
            length = "%.7f" % time_to_distance(f).final_distance
        else:
            length = "-"
        names = ", ".join(p.name for p in f.temporal_properties) or "-"
        print(
            f"{f.id}: {n} samples, {tracks} track{'s' if tracks != 1 else ''}, "
            f"{duration} s, length {length}, properties: {names}"
        )
    bounds = c.bounds
    if bounds is None and c.features:
        try:
            bounds = computed_bounds(c)
        except EngineError:
            bounds = None
    if bounds is not None:
        axes = "xyz"[: bounds.dims]
        span = ", ".join(
            f"{axes[i]} [{repr(bounds.lower[i])}, {repr(bounds.upper[i])}]" for i in range(bounds.dims)
        )
        print(
            f"bounds: {span}, t [{timeutil.format_instant(bounds.period.begin)}, "
            f"{timeutil.format_instant(bounds.period.end)}]"
        )
    return 0


def cmd_export_wkt(args) -> int:
    c, _ = load_collection(args.input, args.format)
    for f in c.features:
        if f.geometry.interpolation is not InterpolationMode.LINEAR:
            print(
                f"ERROR UNSUPPORTED_INTERPOLATION feature {f.id!r} is not linear",
                file=sys.stderr,
            )
            return 1
    for f in c.features:
        for track in f.geometry.tracks:
            if not track.samples:
                continue
            pts = ", ".join(" ".join(fmt_wkt(x) for x in pos) for _, pos in track.samples)
            print(f"{f.id}\tLINESTRING ({pts})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mfengine", description="Moving-features engine")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p, with_format=True):
        p.add_argument("input", help="input file path, or - for standard input")
        if with_format:
            p.add_argument(
                "--format",
                choices=("csv", "xml", "json", "auto"),
                default="auto",
                help="input format (default: detect from extension, then content)",
            )

    p = sub.add_parser("validate", help="parse and report diagnostics")
    add_input(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert between encodings")
    p.add_argument("input", help="input file path, or - for standard input")
    p.add_argument("--format", choices=("csv", "xml", "json"), required=True, help="target format")
    p.add_argument("--strict", action="store_true", help="refuse lossy conversions")
    p.add_argument("--output", default="-", help="output path (default: standard output)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("query", help="evaluate a feature at an instant")
    add_input(p)
    p.add_argument("--feature", action="append", help="feature id (twice for --what distance)")
    p.add_argument("--at", required=True, help="ISO-8601 instant or numeric offset in the document unit")
    p.add_argument(
        "--what",
        default="position",
        help="position, velocity, speed, acceleration, distance, or a property name",
    )
    p.add_argument("--tolerance", type=float, default=0.0, help="tolerance in CRS units")
    p.add_argument("--output", default="-", help="'json' for full-precision structured output, or a path")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("info", help="summarize a document")
    add_input(p)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("export-wkt", help="dump tracks as WKT LINESTRINGs")
    add_input(p)
    p.set_defaults(func=cmd_export_wkt)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CodecError as exc:
        print(f"ERROR {exc.code} {exc.message}", file=sys.stderr)
        return 2
    except EngineError as exc:
        print(f"ERROR {type(exc).__name__} {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ERROR IO {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"ERROR BAD_ARGUMENT {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
