"""Two-parameter prior families and closed-form Hellinger distances.

Both supported families are parametrized by a point ``(gamma1, gamma2)``:

* ``Family.NORMAL``: mean ``gamma1`` (any real), precision ``gamma2 > 0``.
* ``Family.GAMMA``: shape ``gamma1 > 0``, rate ``gamma2 > 0``.

The Hellinger distance between two members of the same family has a
closed form through the Bhattacharyya coefficient ``BC``:

    H(f0, f1) = sqrt(1 - BC),    BC = integral of sqrt(f0 * f1).

All coefficients are evaluated in log space so that extreme parameter
values (large shapes, tiny precisions) neither overflow nor underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln
from scipy.stats import gamma as _gamma_dist

from .errors import DomainError
from .grids import DensityGrid, Scale, normalize_grid

_LOG_2PI = math.log(2.0 * math.pi)


class Family(str, Enum):
    NORMAL = "normal"
    GAMMA = "gamma"


@dataclass(frozen=True)
class ParamPoint:
    """A point in the two-dimensional hyperparameter plane."""

    gamma1: float
    gamma2: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.gamma1, self.gamma2)


def validate_point(family: Family, point: ParamPoint) -> None:
    """Raise :class:`DomainError` if ``point`` is outside the family domain."""
    g1, g2 = point.gamma1, point.gamma2
    if not (math.isfinite(g1) and math.isfinite(g2)):
        raise DomainError(f"non-finite parameter point {point}")
    if family is Family.NORMAL:
        if g2 <= 0.0:
            raise DomainError(f"normal precision must be positive, got {g2}")
    elif family is Family.GAMMA:
        if g1 <= 0.0 or g2 <= 0.0:
            raise DomainError(f"gamma shape and rate must be positive, got {point}")
    else:  # pragma: no cover - enum is closed
        raise DomainError(f"unknown family {family}")


@dataclass(frozen=True)
class PriorSpec:
    """A prior family together with its hyperparameter point."""

    family: Family
    point: ParamPoint

    def __post_init__(self):
        validate_point(self.family, self.point)


def log_prior_density(spec: PriorSpec, x, scale: Scale = Scale.NATURAL):
    """Log density of ``spec`` at ``x`` (scalar or array) on the given scale.

    On ``Scale.LOG_PARAMETER`` the density of ``z = log(theta)`` is returned,
    i.e. the natural density at ``exp(z)`` times the Jacobian ``exp(z)``.
    Only the gamma family supports the log scale: a normal variate is not
    positive, so its log transform is undefined.
    """
    g1, g2 = spec.point.gamma1, spec.point.gamma2
    x = np.asarray(x, dtype=float)
    if spec.family is Family.NORMAL:
        if scale is not Scale.NATURAL:
            raise DomainError("log-parameter scale is undefined for the normal family")
        out = 0.5 * (np.log(g2) - _LOG_2PI) - 0.5 * g2 * (x - g1) ** 2
    else:
        norm = g1 * math.log(g2) - gammaln(g1)
        if scale is Scale.NATURAL:
            if np.any(x <= 0.0):
                raise DomainError("gamma density requires x > 0 on the natural scale")
            out = norm + (g1 - 1.0) * np.log(x) - g2 * x
        else:
            # density of log(theta): extra Jacobian term exp(z) -> + z
            out = norm + g1 * x - g2 * np.exp(x)
    return out if out.ndim else float(out)


def eval_prior_density(spec: PriorSpec, x, scale: Scale = Scale.NATURAL):
    """Density of ``spec`` at ``x`` on the given scale (see :func:`log_prior_density`)."""
    out = np.exp(log_prior_density(spec, x, scale))
    return out if isinstance(out, np.ndarray) and out.ndim else float(out)


def log_density_without_jacobian(spec: PriorSpec, support: np.ndarray, scale: Scale):
    """Log natural density evaluated at the parameter values of ``support``.

    For ``LOG_PARAMETER`` grids the parameter is ``exp(z)`` and the Jacobian
    is deliberately omitted: in prior-ratio computations it cancels between
    numerator and denominator, and dropping it on both sides avoids the
    spurious overflow of ``exp(z)`` factors at the grid edges.
    """
    theta = np.exp(support) if scale is Scale.LOG_PARAMETER else np.asarray(support, dtype=float)
    g1, g2 = spec.point.gamma1, spec.point.gamma2
    if spec.family is Family.NORMAL:
        return 0.5 * (math.log(g2) - _LOG_2PI) - 0.5 * g2 * (theta - g1) ** 2
    if scale is Scale.LOG_PARAMETER:
        # (g1 - 1) * log(exp(z)) computed directly from z, no exp/log round trip
        return g1 * math.log(g2) - gammaln(g1) + (g1 - 1.0) * support - g2 * theta
    if np.any(theta <= 0.0):
        raise DomainError("gamma density requires positive support")
    return g1 * math.log(g2) - gammaln(g1) + (g1 - 1.0) * np.log(theta) - g2 * theta


def hellinger_normal(p0: ParamPoint, p1: ParamPoint) -> float:
    """Hellinger distance between two normal densities.

    Parameters
    ----------
    p0, p1 : ParamPoint
        Mean/precision pairs ``(mu, lam)`` with ``lam > 0``.

    Returns
    -------
    float
        ``sqrt(1 - BC)`` with
        ``BC = sqrt(2 sqrt(lam0 lam1) / (lam0 + lam1))
        * exp(-(mu1 - mu0)^2 lam0 lam1 / (4 (lam0 + lam1)))``.

    Notes
    -----
    For equal precisions ``lam`` the expression collapses to
    ``sqrt(1 - exp(-lam (mu1 - mu0)^2 / 8))``.
    """
    validate_point(Family.NORMAL, p0)
    validate_point(Family.NORMAL, p1)
    if p0 == p1:
        return 0.0
    m0, l0 = p0.as_tuple()
    m1, l1 = p1.as_tuple()
    log_bc = 0.5 * (
        math.log(2.0) + 0.5 * (math.log(l0) + math.log(l1)) - math.log(l0 + l1)
    ) - (m1 - m0) ** 2 * (l0 * l1) / (4.0 * (l0 + l1))
    return math.sqrt(max(0.0, -math.expm1(min(log_bc, 0.0))))


def hellinger_gamma(p0: ParamPoint, p1: ParamPoint) -> float:
    """Hellinger distance between two gamma densities.

    Parameters
    ----------
    p0, p1 : ParamPoint
        Shape/rate pairs ``(alpha, beta)``, all entries positive.

    Returns
    -------
    float
        ``sqrt(1 - BC)`` with
        ``BC = Gamma(abar) / bbar^abar
        * sqrt(beta0^alpha0 beta1^alpha1 / (Gamma(alpha0) Gamma(alpha1)))``
        where ``abar = (alpha0 + alpha1) / 2`` and ``bbar = (beta0 + beta1) / 2``.
    """
    validate_point(Family.GAMMA, p0)
    validate_point(Family.GAMMA, p1)
    if p0 == p1:
        return 0.0
    a0, b0 = p0.as_tuple()
    a1, b1 = p1.as_tuple()
    abar = 0.5 * (a0 + a1)
    bbar = 0.5 * (b0 + b1)
    log_bc = (
        gammaln(abar)
        - abar * math.log(bbar)
        + 0.5 * (a0 * math.log(b0) + a1 * math.log(b1))
        - 0.5 * (gammaln(a0) + gammaln(a1))
    )
    return math.sqrt(max(0.0, -math.expm1(min(log_bc, 0.0))))


def hellinger_analytic(family: Family, p0: ParamPoint, p1: ParamPoint) -> float:
    """Dispatch to the closed form for ``family``."""
    if family is Family.NORMAL:
        return hellinger_normal(p0, p1)
    return hellinger_gamma(p0, p1)


def _gamma_log_quantile(a: float, b: float, p: float) -> float:
    """log of the gamma quantile, robust for tiny shapes where ppf underflows."""
    q = _gamma_dist.ppf(p, a, scale=1.0 / b)
    if q > 0.0 and math.isfinite(q):
        return math.log(q)
    # lower-tail asymptotic: P(X <= q) ~ (b q)^a / Gamma(a + 1)
    return (math.log(p) + gammaln(a + 1.0)) / a - math.log(b)


def tabulate_prior(
    spec: PriorSpec,
    scale: Scale = Scale.NATURAL,
    n_points: int = 4001,
    tail_mass: float = 1e-8,
) -> DensityGrid:
    """Tabulate a prior density on an equispaced grid wide enough for
    Bhattacharyya quadrature.

    Normal densities are tabulated on mean +/- 10 standard deviations;
    gamma densities between the ``tail_mass`` and ``1 - tail_mass``
    quantiles. The returned grid is normalized.
    """
    if n_points < 8:
        raise DomainError("tabulation needs at least 8 points")
    g1, g2 = spec.point.gamma1, spec.point.gamma2
    if spec.family is Family.NORMAL:
        if scale is not Scale.NATURAL:
            raise DomainError("log-parameter scale is undefined for the normal family")
        sd = 1.0 / math.sqrt(g2)
        support = np.linspace(g1 - 10.0 * sd, g1 + 10.0 * sd, n_points)
    else:
        lo = _gamma_log_quantile(g1, g2, tail_mass)
        hi = _gamma_log_quantile(g1, g2, 1.0 - tail_mass)
        if scale is Scale.LOG_PARAMETER:
            support = np.linspace(lo, hi, n_points)
        else:
            support = np.linspace(math.exp(lo), math.exp(hi), n_points)
    values = np.exp(log_prior_density(spec, support, scale))
    return normalize_grid(DensityGrid(support, values, scale))
