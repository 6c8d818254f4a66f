"""Modality classification of EC densities.

The density is examined on (0, 2*pi]. Interior local maxima are found on a
uniform grid and polished by golden-section search. The right end point 2*pi
counts as a mode when the density is still rising into it. For the cardioid
(``beta = 1``) the density is continuous across the seam, so the point must
also beat the density just past 0. For ``beta != 1`` it is generally
discontinuous there, and the 0+ side is not compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .ec_core import ECParams, _pdf
from .numerics import TWO_PI, NumericsError, golden_max

BORDERLINE_TOL = 1e-10


class ModalityKind(str, Enum):
    AMODAL = "Amodal"
    UNIMODAL = "Unimodal"
    BIMODAL = "Bimodal"

    @property
    def symbol(self) -> str:
        return self.value[0]


class TooManyModesError(NumericsError):
    def __init__(self, locations):
        self.locations = tuple(float(x) for x in locations)
        super().__init__(f"{len(self.locations)} modes found at {list(self.locations)}")


@dataclass(frozen=True)
class ModalityClass:
    kind: ModalityKind
    mode_locations: tuple[float, ...] = ()
    borderline: bool = False

    def __post_init__(self):
        expected = {ModalityKind.AMODAL: 0, ModalityKind.UNIMODAL: 1, ModalityKind.BIMODAL: 2}[self.kind]
        if len(self.mode_locations) != expected:
            raise ValueError(f"{self.kind.value} needs {expected} locations, got {len(self.mode_locations)}")


def _grid_maxima(f: np.ndarray) -> list[int]:
    # >= on the left so a maximum straddling two grid points is caught once
    inner = np.nonzero((f[1:-1] >= f[:-2]) & (f[1:-1] > f[2:]))[0] + 1
    return [int(i) for i in inner]


def _prominence(f: np.ndarray, i: int) -> float:
    """Height of grid maximum ``i`` above the higher of its two flanking minima."""
    left = i
    while left > 0 and f[left - 1] <= f[left]:
        left -= 1
    right = i
    while right < len(f) - 1 and f[right + 1] <= f[right]:
        right += 1
    return float(f[i] - max(f[left], f[right]))


def classify_modality(p: ECParams, grid_n: int = 8192, merge_tol: float = 1e-3) -> ModalityClass:
    """Amodal, unimodal or bimodal, with refined mode locations.

    ``borderline`` is set when the two highest maxima differ by less than
    1e-10 in density, or when a maximum rises less than that above its
    neighbouring minimum; such cells may flip under grid refinement.
    """
    if grid_n < 1024:
        raise ValueError("grid_n must be at least 1024")
    if not merge_tol > 0:
        raise ValueError("merge_tol must be positive")
    h = TWO_PI / grid_n
    t = h * np.arange(1, grid_n + 1)
    t[-1] = TWO_PI
    f = _pdf(t, p)
    density = lambda x: float(_pdf(np.float64(x), p))  # noqa: E731

    locs: list[float] = []
    heights: list[float] = []
    prominences: list[float] = []
    for i in _grid_maxima(f):
        x = golden_max(density, float(t[i - 1]), float(t[i + 1]), tol=1e-10)
        locs.append(x)
        heights.append(density(x))
        prominences.append(_prominence(f, i))

    rising_end = f[-1] > f[-2]
    if rising_end and (p.beta != 1.0 or f[-1] > f[0]):
        locs.append(TWO_PI)
        heights.append(float(f[-1]))
        prominences.append(float(f[-1] - f[-2]) if p.beta != 1.0 else float(f[-1] - max(f[-2], f[0])))

    # merge maxima that refined onto (nearly) the same point
    order = np.argsort(locs)
    merged: list[tuple[float, float, float]] = []
    for j in order:
        item = (locs[j], heights[j], prominences[j])
        if merged and item[0] - merged[-1][0] < merge_tol:
            if item[1] > merged[-1][1]:
                merged[-1] = item
            continue
        merged.append(item)

    if len(merged) > 2:
        raise TooManyModesError([m[0] for m in merged])
    borderline = any(m[2] < BORDERLINE_TOL for m in merged)
    if len(merged) == 2 and abs(merged[0][1] - merged[1][1]) < BORDERLINE_TOL:
        borderline = True
    kind = (ModalityKind.AMODAL, ModalityKind.UNIMODAL, ModalityKind.BIMODAL)[len(merged)]
    return ModalityClass(kind, tuple(m[0] for m in merged), borderline)


@dataclass(frozen=True)
class ModalityCell:
    beta: float
    rho: float
    mu: float
    result: Optional[ModalityClass] = None
    error: Optional[str] = None

    @property
    def label(self) -> str:
        return "Error" if self.result is None else self.result.kind.value


def modality_table(beta_list: Iterable[float], rho_list: Iterable[float], mu_list: Iterable[float],
                   grid_n: int = 8192, merge_tol: float = 1e-3) -> list[ModalityCell]:
    """Classify every lattice cell, ordered by beta, then mu, then rho."""
    betas, rhos, mus = list(beta_list), list(rho_list), list(mu_list)
    if not (betas and rhos and mus):
        raise ValueError("parameter lists must be non-empty")
    cells = []
    for b in betas:
        for m in mus:
            for r in rhos:
                p = ECParams(float(b), float(r), float(m))
                try:
                    cells.append(ModalityCell(p.beta, p.rho, p.mu, classify_modality(p, grid_n, merge_tol)))
                except TooManyModesError as exc:
                    cells.append(ModalityCell(p.beta, p.rho, p.mu, None, str(exc)))
    return cells


MODALITY_HEADER = ("beta", "rho", "mu", "class", "mode1", "mode2", "borderline")


def modality_row(cell: ModalityCell) -> tuple:
    locs = cell.result.mode_locations if cell.result else ()
    pad = [repr(float(x)) for x in locs] + [""] * (2 - len(locs))
    border = cell.result.borderline if cell.result else False
    return (repr(cell.beta), repr(cell.rho), repr(cell.mu), cell.label, pad[0], pad[1], str(border).lower())


def mode_distance(a: float, b: float) -> float:
    """Circular distance between two angles."""
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


__all__ = [
    "ModalityKind", "ModalityClass", "ModalityCell", "TooManyModesError", "classify_modality",
    "modality_table", "modality_row", "MODALITY_HEADER", "mode_distance", "BORDERLINE_TOL",
]
