"""Unit-suffixed quantity parsing for scenario files.

Scenario values are either bare numbers (already SI) or strings like
``"100 km"``; everything is converted to SI at ingestion so downstream code
never sees mixed units.
"""

from __future__ import annotations

import math

from .errors import ConfigurationError

__all__ = ["parse_quantity", "UNIT_TABLES"]

UNIT_TABLES: dict[str, dict[str, float]] = {
    "length": {
        "m": 1.0, "km": 1e3, "cm": 1e-2, "mm": 1e-3,
        "um": 1e-6, "µm": 1e-6, "nm": 1e-9,
    },
    "time": {
        "s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9, "ps": 1e-12,
        "min": 60.0, "h": 3600.0, "day": 86400.0, "days": 86400.0,
    },
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "THz": 1e12},
    "angle": {
        "rad": 1.0, "mrad": 1e-3, "urad": 1e-6, "µrad": 1e-6,
        "deg": math.pi / 180.0, "mdeg": math.pi / 180.0 * 1e-3,
    },
    "speed": {"m/s": 1.0, "km/s": 1e3},
    "rate": {"1/s": 1.0, "/s": 1.0, "Hz": 1.0, "counts/s": 1.0, "photons/s": 1.0},
    "attenuation": {"dB/km": 1.0},
    "decibel": {"dB": 1.0},
    "dimensionless": {},
}


def parse_quantity(value, kind: str, field: str = "") -> float:
    """Convert ``value`` (number, or "number unit" string) to SI.

    ``kind`` selects the admissible unit table.  Bare numbers pass through
    unchanged (assumed SI, except ``attenuation``/``decibel`` whose natural
    unit is the table's base).
    """
    if kind not in UNIT_TABLES:
        raise ConfigurationError(f"unknown quantity kind {kind!r}", field=field)
    if isinstance(value, bool):
        raise ConfigurationError("expected a number or 'number unit' string", field=field)
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigurationError(f"expected a number or string, got {type(value).__name__}", field=field)
    parts = value.strip().split()
    try:
        magnitude = float(parts[0])
    except (ValueError, IndexError):
        raise ConfigurationError(f"cannot parse number from {value!r}", field=field) from None
    if len(parts) == 1:
        return magnitude
    if len(parts) != 2:
        raise ConfigurationError(f"expected 'number unit', got {value!r}", field=field)
    unit = parts[1]
    table = UNIT_TABLES[kind]
    if unit not in table:
        allowed = ", ".join(sorted(table)) or "none (dimensionless)"
        raise ConfigurationError(f"unit {unit!r} not valid for {kind} (allowed: {allowed})", field=field)
    return magnitude * table[unit]
