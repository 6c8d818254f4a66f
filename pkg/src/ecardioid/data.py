"""Angle parsing and the bundled wind-direction dataset."""

from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Iterable

import numpy as np

from .ec_core import normalize_angle
from .estimation import Sample

# 21 wind directions in degrees, in recorded order
WIND_DEGREES = (356, 97, 211, 232, 343, 292, 157, 302, 335, 302, 324,
                85, 324, 340, 157, 238, 254, 146, 232, 122, 329)

UNITS = ("deg", "rad")
_SPLIT = re.compile(r"[,\s]+")


class AngleParseError(ValueError):
    def __init__(self, line: int, token: str, reason: str = "not a finite number"):
        self.line = line
        self.token = token
        super().__init__(f"line {line}: cannot parse {token!r} ({reason})")


def to_radians(values, unit: str) -> np.ndarray:
    if unit not in UNITS:
        raise ValueError(f"unit must be one of {UNITS}, got {unit!r}")
    a = np.asarray(values, dtype=float)
    return np.radians(a) if unit == "deg" else a


def parse_angle_values(lines: Iterable[str], unit: str = "rad") -> np.ndarray:
    """Parse one value per line or comma separated values; fold onto (0, 2*pi].

    Blank lines and text after ``#`` are ignored.
    """
    raw = []
    for lineno, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        for tok in _SPLIT.split(body):
            if not tok:
                continue
            try:
                v = float(tok)
            except ValueError:
                raise AngleParseError(lineno, tok) from None
            if not math.isfinite(v):
                raise AngleParseError(lineno, tok)
            raw.append(v)
    if not raw:
        raise ValueError("no angles found")
    return np.atleast_1d(normalize_angle(to_radians(raw, unit)))


def parse_angles(source: str | Path | Iterable[str], unit: str = "rad") -> Sample:
    """Read a :class:`Sample` from a path or an iterable of text lines."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return Sample(parse_angle_values(fh, unit))
    return Sample(parse_angle_values(source, unit))


def wind_sample() -> Sample:
    return Sample(np.atleast_1d(normalize_angle(np.radians(np.array(WIND_DEGREES, dtype=float)))))
