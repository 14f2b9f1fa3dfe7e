"""Tabulated one-dimensional densities and grid-based Hellinger distances.

A :class:`DensityGrid` stores density values on a strictly increasing
support together with the scale of that support. All integrals use the
trapezoidal rule, which is effectively spectrally accurate for the smooth,
rapidly decaying densities produced by the tabulation helpers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import AlignmentError, DomainError, IngestionError


class Scale(str, Enum):
    """Support scale of a tabulated density.

    ``NATURAL`` grids tabulate the density of the parameter itself,
    ``LOG_PARAMETER`` grids tabulate the density of its logarithm
    (meaningful only for positive-support quantities).
    """

    NATURAL = "natural"
    LOG_PARAMETER = "log"


@dataclass(frozen=True)
class DensityGrid:
    """Density values tabulated on a strictly increasing support.

    Values must be finite and non-negative with at least one positive
    entry, and the grid must contain at least 8 points. Arrays are copied
    and frozen at construction.
    """

    support: np.ndarray
    values: np.ndarray
    scale: Scale = Scale.NATURAL

    def __post_init__(self):
        support = np.array(self.support, dtype=float)
        values = np.array(self.values, dtype=float)
        if support.ndim != 1 or values.ndim != 1 or support.shape != values.shape:
            raise DomainError("support and values must be 1-d arrays of equal length")
        if support.size < 8:
            raise DomainError("a density grid needs at least 8 points")
        if not np.all(np.isfinite(support)) or not np.all(np.isfinite(values)):
            raise DomainError("support and values must be finite")
        if np.any(np.diff(support) <= 0.0):
            raise DomainError("support must be strictly increasing")
        if np.any(values < 0.0):
            raise DomainError("density values must be non-negative")
        if not np.any(values > 0.0):
            raise DomainError("density values must not be identically zero")
        support.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.support.size)


def trapezoid_mass(grid: DensityGrid) -> float:
    """Trapezoidal integral of the grid values over its support."""
    return float(np.trapezoid(grid.values, grid.support))


def normalize_grid(grid: DensityGrid) -> DensityGrid:
    """Rescale values so the trapezoidal integral over the support is 1."""
    mass = trapezoid_mass(grid)
    if not (mass > 0.0) or not np.isfinite(mass):
        raise DomainError(f"grid mass {mass!r} cannot be normalized")
    return DensityGrid(grid.support, grid.values / mass, grid.scale)


def common_support(g0: DensityGrid, g1: DensityGrid) -> tuple[DensityGrid, DensityGrid]:
    """Resample two grids onto the intersection of their support ranges.

    Identical supports are returned unchanged. Otherwise both grids are
    linearly interpolated onto an equispaced grid over the overlap, with
    as many points as the finer input. Values are carried over without
    renormalization, so the aligned grids still represent the original
    densities restricted to the overlap (density outside a grid's range
    is treated as zero mass).
    """
    if g0.scale is not g1.scale:
        raise AlignmentError(f"cannot align grids on scales {g0.scale} and {g1.scale}")
    if np.array_equal(g0.support, g1.support):
        return g0, g1
    lo = max(g0.support[0], g1.support[0])
    hi = min(g0.support[-1], g1.support[-1])
    if not (hi > lo):
        raise AlignmentError(
            f"support ranges [{g0.support[0]}, {g0.support[-1]}] and "
            f"[{g1.support[0]}, {g1.support[-1]}] do not overlap"
        )
    m = max(len(g0), len(g1))
    xs = np.linspace(lo, hi, m)
    v0 = np.interp(xs, g0.support, g0.values)
    v1 = np.interp(xs, g1.support, g1.values)
    if not np.any(v0 > 0.0) or not np.any(v1 > 0.0):
        raise AlignmentError("no density mass inside the overlapping support range")
    return DensityGrid(xs, v0, g0.scale), DensityGrid(xs, v1, g1.scale)


def bhattacharyya_grid(g0: DensityGrid, g1: DensityGrid) -> float:
    """Bhattacharyya coefficient of two aligned, normalized grids.

    Requires bitwise identical supports; use :func:`common_support` first
    for grids tabulated on different ranges. The result is clamped to
    [0, 1] against trapezoidal rounding.
    """
    if g0.scale is not g1.scale or not np.array_equal(g0.support, g1.support):
        raise AlignmentError("bhattacharyya_grid requires grids on an identical support")
    bc = float(np.trapezoid(np.sqrt(g0.values * g1.values), g0.support))
    return min(1.0, max(0.0, bc))


def hellinger_grid(g0: DensityGrid, g1: DensityGrid) -> float:
    """Hellinger distance ``sqrt(1 - BC)`` between two tabulated densities.

    Grids on different supports are aligned with :func:`common_support`
    before the coefficient is computed.
    """
    a0, a1 = common_support(g0, g1)
    return float(np.sqrt(max(0.0, 1.0 - bhattacharyya_grid(a0, a1))))


def read_density_csv(path, scale: Scale = Scale.NATURAL) -> DensityGrid:
    """Read a two-column CSV ``x,density`` with a mandatory header row."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 2:
        raise IngestionError(f"{path}: expected a header row and data rows")
    header = rows[0]
    if len(header) < 2:
        raise IngestionError(f"{path}: expected two columns, got {header!r}")
    try:
        float(header[0])
    except ValueError:
        pass
    else:
        raise IngestionError(f"{path}: missing header row (first row is numeric)")
    xs, vs = [], []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) < 2:
            raise IngestionError(f"{path}:{i}: expected two columns, got {row!r}")
        try:
            xs.append(float(row[0]))
            vs.append(float(row[1]))
        except ValueError as exc:
            raise IngestionError(f"{path}:{i}: non-numeric entry {row!r}") from exc
    try:
        return DensityGrid(np.array(xs), np.array(vs), scale)
    except DomainError as exc:
        raise IngestionError(f"{path}: {exc}") from exc


def write_density_csv(path, grid: DensityGrid) -> None:
    """Write a grid as a two-column CSV ``x,density`` with a header row."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "density"])
        for x, v in zip(grid.support, grid.values):
            writer.writerow([repr(float(x)), repr(float(v))])
