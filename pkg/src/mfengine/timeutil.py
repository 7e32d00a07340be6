"""Time handling: epoch-millisecond instants, ISO-8601 text, offset encodings.

Canonical time is an integer count of milliseconds since the Unix epoch,
UTC. Offsets in documents (e.g. "5" with unit "sec") are converted with
exact decimal arithmetic so no float drift enters timestamps.
"""

from __future__ import annotations

import re
from datetime import datetime, timedelta, timezone
from decimal import Decimal, InvalidOperation, ROUND_HALF_UP
from fractions import Fraction

_FRACTION = re.compile(r"^(.*T\d{2}:\d{2}:\d{2})\.(\d+)(.*)$")

EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)

# document time-unit name -> milliseconds per unit
TIME_UNIT_MS = {
    "millisec": 1,
    "ms": 1,
    "milliseconds": 1,
    "sec": 1000,
    "s": 1000,
    "second": 1000,
    "seconds": 1000,
    "min": 60_000,
    "minute": 60_000,
    "minutes": 60_000,
    "hour": 3_600_000,
    "hours": 3_600_000,
    "day": 86_400_000,
    "days": 86_400_000,
}


def unit_millis(unit: str) -> int:
    """Milliseconds per document time unit; raises ValueError on unknown units."""
    try:
        return TIME_UNIT_MS[unit.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown time unit {unit!r}") from None


def parse_instant(text: str) -> int:
    """Parse an ISO-8601 timestamp to epoch milliseconds (UTC).

    Accepts a trailing 'Z' or an explicit offset; naive timestamps are taken
    as UTC. Sub-millisecond digits are rounded to the nearest millisecond.
    """
    s = text.strip()
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    m = _FRACTION.match(s)
    if m:
        # fromisoformat (3.10) accepts only 3- or 6-digit fractions
        head, frac, tail = m.groups()
        s = f"{head}.{(frac + '000000')[:6]}{tail}"
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    td = dt.astimezone(timezone.utc) - EPOCH
    return td.days * 86_400_000 + td.seconds * 1000 + round(td.microseconds / 1000)


def format_instant(ms: int) -> str:
    """Format epoch milliseconds as ISO-8601 UTC with trailing Z.

    Whole seconds are printed without a fractional part; otherwise exactly
    three fractional digits are used.
    """
    dt = EPOCH + timedelta(milliseconds=ms)
    base = dt.strftime("%Y-%m-%dT%H:%M:%S")
    millis = dt.microsecond // 1000
    if millis:
        return f"{base}.{millis:03d}Z"
    return base + "Z"


def parse_offset(text: str, unit_in_ms: int) -> int:
    """Convert a decimal offset in document units to milliseconds (exact)."""
    try:
        d = Decimal(text.strip()) * unit_in_ms
    except InvalidOperation:
        raise ValueError(f"not a numeric offset: {text!r}") from None
    return int(d.to_integral_value(rounding=ROUND_HALF_UP))


def is_numeric(text: str) -> bool:
    try:
        Decimal(text.strip())
    except InvalidOperation:
        return False
    return True


def parse_time_value(text: str, base_ms: int, unit_in_ms: int) -> int:
    """Parse a document time field: numeric offset from base, or ISO absolute."""
    if is_numeric(text):
        return base_ms + parse_offset(text, unit_in_ms)
    return parse_instant(text)


def offset_is_exact(delta_ms: int, unit_in_ms: int) -> bool:
    """True when delta_ms/unit has a terminating decimal expansion."""
    den = Fraction(delta_ms, unit_in_ms).denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    return den == 1


def format_offset(delta_ms: int, unit_in_ms: int) -> str:
    """Format a millisecond delta as a decimal offset in document units.

    No trailing zeros, no exponent. Caller must ensure exactness (see
    offset_is_exact); fractions are computed with the Decimal type.
    """
    q = (Decimal(delta_ms) / Decimal(unit_in_ms)).normalize()
    return format(q, "f")
