"""Polar search for Hellinger epsilon-contours in the hyperparameter plane.

The contour of points at Hellinger distance ``epsilon`` from a base prior
is traced in scaled polar coordinates. A pre-exploration step first solves
the four cardinal directions on the unscaled plane; the resulting moduli
become per-quadrant scaling factors ``c_x(phi)``, ``c_y(phi)`` so that the
contour is close to the unit circle in scaled coordinates. Each direction
is then a one-dimensional root-finding problem in ``z = log r``:

    H(base, base + exp(z) * (cos(phi) c_x, sin(phi) c_y)) = epsilon,

solved by bracketing plus Brent refinement. The log-radius keeps the
problem well conditioned across the many orders of magnitude separating
axis scales (for diffuse priors the two cardinal moduli can differ by a
factor of 1e4 and more).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ContourUnreachableError, DomainError, PartialGridError
from .families import Family, ParamPoint, PriorSpec, hellinger_analytic

# Acceptable defect |H - epsilon| relative to epsilon for a solved point.
RESIDUAL_RTOL = 1e-4

# Search window for z = log r around the pre-explored unit radius.
_Z_INIT = 6.0
_Z_MAX = 20.0

_CARDINAL = {
    0.0: (1.0, 0.0),
    math.pi / 2.0: (0.0, 1.0),
    math.pi: (-1.0, 0.0),
    -math.pi / 2.0: (0.0, -1.0),
}


@dataclass(frozen=True)
class CardinalModuli:
    """Unscaled contour moduli along the four cardinal directions.

    ``plus_x`` is the modulus toward increasing gamma1 (angle 0),
    ``plus_y`` toward increasing gamma2 (angle pi/2), ``minus_x`` toward
    decreasing gamma1 (angle pi) and ``minus_y`` toward decreasing gamma2
    (angle -pi/2).
    """

    plus_x: float
    plus_y: float
    minus_x: float
    minus_y: float

    def as_dict(self) -> dict:
        return {
            "plus_x": self.plus_x,
            "plus_y": self.plus_y,
            "minus_x": self.minus_x,
            "minus_y": self.minus_y,
        }


@dataclass(frozen=True)
class GridPoint:
    """One solved contour direction: angle, parameter point, defect |H - eps|."""

    phi: float
    point: ParamPoint
    residual: float


@dataclass(frozen=True)
class PolarGrid:
    """An epsilon-contour sampled over equidistant angles."""

    base: PriorSpec
    epsilon: float
    points: tuple[GridPoint, ...]
    cardinal: CardinalModuli
    failed_angles: tuple[float, ...] = ()

    @property
    def n_angles(self) -> int:
        return len(self.points) + len(self.failed_angles)


def _offset_point(base: PriorSpec, r: float, ux: float, uy: float) -> ParamPoint:
    return ParamPoint(base.point.gamma1 + r * ux, base.point.gamma2 + r * uy)


def _max_radius(base: PriorSpec, ux: float, uy: float) -> float:
    """Largest radius keeping the offset point inside the family domain."""
    caps = []
    if uy < 0.0:
        caps.append(base.point.gamma2 / -uy)
    if base.family is Family.GAMMA and ux < 0.0:
        caps.append(base.point.gamma1 / -ux)
    return min(caps) if caps else math.inf


def _distance_at(base: PriorSpec, r: float, ux: float, uy: float) -> float:
    return hellinger_analytic(base.family, base.point, _offset_point(base, r, ux, uy))


def _solve_direction(base: PriorSpec, epsilon: float, ux: float, uy: float, phi: float) -> float:
    """Solve H(r) = epsilon along a fixed direction, returning the radius r.

    Works on z = log r. The lower bracket end is pushed down until the
    distance falls below epsilon, the upper end up until it exceeds
    epsilon, both within the domain cap; failure to bracket means the
    contour is unreachable along this direction.
    """
    r_cap = _max_radius(base, ux, uy)
    # stay strictly inside the domain when the cap is finite
    z_cap = math.log(r_cap) + math.log1p(-1e-12) if math.isfinite(r_cap) else math.inf

    def g(z: float) -> float:
        return _distance_at(base, math.exp(z), ux, uy) - epsilon

    z_hi = min(_Z_INIT, z_cap)
    z_lo = min(-_Z_INIT, z_cap - 2.0 * _Z_INIT)
    g_lo = g(z_lo)
    while g_lo > 0.0 and z_lo > -_Z_MAX:
        z_lo = max(z_lo - 4.0, -_Z_MAX)
        g_lo = g(z_lo)
    g_hi = g(z_hi)
    while g_hi < 0.0 and z_hi < min(_Z_MAX, z_cap):
        z_hi = min(z_hi + 4.0, _Z_MAX, z_cap)
        g_hi = g(z_hi)
    if not (g_lo < 0.0 < g_hi):
        raise ContourUnreachableError(
            phi,
            f"no Hellinger-{epsilon} point along angle {phi:.6f} within "
            f"log-radius [{z_lo:.1f}, {z_hi:.1f}] (domain cap {r_cap!r})",
        )
    z = brentq(g, z_lo, z_hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=256)
    return math.exp(z)


def preexplore(base: PriorSpec, epsilon: float) -> CardinalModuli:
    """Solve the four cardinal directions on the unscaled plane.

    Returns the moduli r*(0), r*(pi/2), r*(pi), r*(-pi/2) used as scaling
    factors by the full polar search.
    """
    _check_epsilon(epsilon)
    moduli = {}
    for delta, (ux, uy) in _CARDINAL.items():
        moduli[delta] = _solve_direction(base, epsilon, ux, uy, delta)
    return CardinalModuli(
        plus_x=moduli[0.0],
        plus_y=moduli[math.pi / 2.0],
        minus_x=moduli[math.pi],
        minus_y=moduli[-math.pi / 2.0],
    )


def scaling_factors(phi: float, moduli: CardinalModuli) -> tuple[float, float]:
    """Piecewise-constant axis scalings for angle ``phi`` in [-pi, pi].

    ``c_x`` is the +x modulus on the closed interval [-pi/2, pi/2] and the
    -x modulus elsewhere; ``c_y`` is the +y modulus on the closed interval
    [0, pi] and the -y modulus elsewhere. At the boundary angles the first
    (closed) interval wins; the choice is immaterial because the affected
    coordinate carries a vanishing cos/sin factor there.
    """
    if not (-math.pi <= phi <= math.pi):
        raise DomainError(f"angle must lie in [-pi, pi], got {phi!r}")
    cx = moduli.plus_x if -math.pi / 2.0 <= phi <= math.pi / 2.0 else moduli.minus_x
    cy = moduli.plus_y if 0.0 <= phi <= math.pi else moduli.minus_y
    return cx, cy


def solve_radius(
    base: PriorSpec, epsilon: float, phi: float, cx: float, cy: float
) -> ParamPoint:
    """Contour point along ``phi`` using axis scalings ``cx``, ``cy``."""
    _check_epsilon(epsilon)
    if cx <= 0.0 or cy <= 0.0:
        raise DomainError("scaling factors must be positive")
    ux = math.cos(phi) * cx
    uy = math.sin(phi) * cy
    r = _solve_direction(base, epsilon, ux, uy, phi)
    point = _offset_point(base, r, ux, uy)
    residual = abs(hellinger_analytic(base.family, base.point, point) - epsilon)
    if residual > epsilon * RESIDUAL_RTOL:
        raise ContourUnreachableError(
            phi, f"solver defect {residual!r} exceeds {epsilon * RESIDUAL_RTOL!r} at angle {phi!r}"
        )
    return point


def compute_grid(
    base: PriorSpec,
    epsilon: float,
    n_angles: int = 400,
    allow_partial: bool = False,
) -> PolarGrid:
    """Trace the epsilon-contour over ``n_angles`` equidistant directions.

    Angles run over [-pi, pi) as ``-pi + 2 pi k / n_angles`` so that no
    direction is duplicated and, for the default 400, the cardinal
    directions land exactly on grid angles. With ``allow_partial`` the
    grid is returned with unreachable directions recorded in
    ``failed_angles`` instead of raising :class:`PartialGridError`.

    The search is deterministic: identical inputs produce bitwise
    identical grids. Directions are independent of one another, so the
    per-angle solves could run in any order; results are always reported
    in increasing-angle order.
    """
    _check_epsilon(epsilon)
    if n_angles < 8:
        raise DomainError(f"n_angles must be at least 8, got {n_angles}")
    cardinal = preexplore(base, epsilon)
    phis = -math.pi + 2.0 * math.pi * np.arange(n_angles) / n_angles
    points = []
    failed = []
    for phi in phis:
        phi = float(phi)
        cx, cy = scaling_factors(phi, cardinal)
        try:
            point = solve_radius(base, epsilon, phi, cx, cy)
        except ContourUnreachableError:
            failed.append(phi)
            continue
        residual = abs(hellinger_analytic(base.family, base.point, point) - epsilon)
        points.append(GridPoint(phi=phi, point=point, residual=residual))
    if failed and not allow_partial:
        raise PartialGridError(failed)
    return PolarGrid(
        base=base,
        epsilon=epsilon,
        points=tuple(points),
        cardinal=cardinal,
        failed_angles=tuple(failed),
    )


def _check_epsilon(epsilon: float) -> None:
    if not (0.0 < epsilon <= 0.5):
        raise DomainError(f"epsilon must lie in (0, 0.5], got {epsilon!r}")
