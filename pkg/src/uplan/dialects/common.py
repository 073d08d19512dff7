"""Helpers shared by the dialect readers."""

from __future__ import annotations

import re

from ..mapping import DialectMapping
from ..plan import Property, PropertyValue

_TIME_RE = re.compile(r"^([-+]?\d+(?:\.\d+)?)\s*(us|ms|s)$")
_BYTES_RE = re.compile(r"^([-+]?\d+(?:\.\d+)?)\s*(B|kB|KB|MB|GB)$", re.IGNORECASE)
_BYTE_FACTORS = {"b": 1, "kb": 1024, "mb": 1024**2, "gb": 1024**3}


def coerce_value(identifier: str, value: PropertyValue) -> PropertyValue:
    """Normalize units implied by the unified identifier suffix.

    Identifiers ending in ``_ms`` hold milliseconds and ones ending in
    ``_bytes`` hold bytes. String values with a unit suffix ("0.124 ms",
    "25kB") are converted to numbers; bare numbers feeding a ``_bytes``
    identifier are taken as kilobytes, which is how the only sources
    mapped onto those identifiers report them.
    """
    if isinstance(value, str):
        text = value.strip()
        if identifier.endswith("_ms"):
            match = _TIME_RE.match(text)
            if match:
                number = float(match.group(1))
                unit = match.group(2)
                if unit == "s":
                    return number * 1000.0
                if unit == "us":
                    return number / 1000.0
                return number
        if identifier.endswith("_bytes"):
            match = _BYTES_RE.match(text)
            if match:
                number = float(match.group(1)) * _BYTE_FACTORS[match.group(2).lower()]
                return int(number) if number.is_integer() else number
    elif isinstance(value, (int, float)) and not isinstance(value, bool):
        if identifier.endswith("_bytes"):
            scaled = float(value) * 1024
            return int(scaled) if scaled.is_integer() else scaled
    return value


def unmapped_warning(family: str, kind: str, raw_name: str) -> str:
    return f"{family}: no mapping for {kind} name {raw_name!r}, using fallback"


def mapped_property(
    mapping: DialectMapping,
    family: str,
    raw_name: str,
    value: PropertyValue,
    warnings: list[str],
) -> Property:
    """Build a Property through the mapping table, warning on a miss."""
    category, identifier, hit = mapping.map_property(family, raw_name)
    if not hit:
        warnings.append(unmapped_warning(family, "property", raw_name))
    return Property(category, identifier, coerce_value(identifier, value))


def split_outside_brackets(text: str, separator: str = ",") -> list[str]:
    """Split on a separator, ignoring separators inside (), [] or quotes."""
    parts: list[str] = []
    depth = 0
    quote: str | None = None
    start = 0
    for position, ch in enumerate(text):
        if quote is not None:
            if ch == quote:
                quote = None
            continue
        if ch in "\"'":
            quote = ch
        elif ch in "([":
            depth += 1
        elif ch in ")]":
            depth = max(0, depth - 1)
        elif ch == separator and depth == 0:
            parts.append(text[start:position])
            start = position + 1
    parts.append(text[start:])
    return [p.strip() for p in parts if p.strip()]


def find_outside_brackets(text: str, needle: str) -> int:
    """Index of the first occurrence of *needle* outside brackets, or -1."""
    depth = 0
    for position, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth = max(0, depth - 1)
        elif depth == 0 and text.startswith(needle, position):
            return position
    return -1
