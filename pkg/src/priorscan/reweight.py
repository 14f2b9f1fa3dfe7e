"""Instantaneous posterior updates under a perturbed prior.

Given a tabulated marginal posterior obtained under a base prior, the
posterior under a nearby prior is proportional to

    posterior_new(theta) ~ posterior_base(theta) * prior_new(theta) / prior_base(theta),

which requires no refit of the underlying model. The update is performed
in log space with a max-shift before exponentiation. On log-parameter
grids both prior densities would carry the same Jacobian factor, so it is
cancelled analytically rather than evaluated.

Two guards keep the ratio trustworthy:

* support points whose base posterior value is below 1e-15 of the peak
  are zeroed, because the posterior/prior ratio is pure noise there and
  a perturbed prior tail can otherwise amplify it without bound;
* if the base prior underflows (below 1e-300) at a point that still
  carries posterior mass, the update is refused outright.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePosteriorWarning, DomainError, ReweightingError
from .families import Family, PriorSpec, log_density_without_jacobian
from .grids import DensityGrid, Scale, bhattacharyya_grid, normalize_grid, trapezoid_mass

TAIL_GUARD = 1e-15
DEGENERATE_GUARD = 1e-12
_LOG_PRIOR_FLOOR = math.log(1e-300)


@dataclass(frozen=True)
class PosteriorInput:
    """A normalized marginal posterior tied to the prior it was computed under.

    ``parametrization`` declares whether the grid support holds the
    parameter itself or its logarithm, and must match ``posterior.scale``.
    """

    posterior: DensityGrid
    base_prior: PriorSpec
    parametrization: Scale = Scale.NATURAL

    def __post_init__(self):
        if self.posterior.scale is not self.parametrization:
            raise DomainError(
                f"grid scale {self.posterior.scale} does not match "
                f"parametrization {self.parametrization}"
            )
        if (
            self.base_prior.family is Family.GAMMA
            and self.parametrization is Scale.NATURAL
            and self.posterior.support[0] <= 0.0
        ):
            raise DomainError("gamma posterior support must be positive on the natural scale")
        if self.base_prior.family is Family.NORMAL and self.parametrization is Scale.LOG_PARAMETER:
            raise DomainError("log-parameter grids are undefined for normal priors")
        mass = trapezoid_mass(self.posterior)
        if abs(mass - 1.0) > 1e-6:
            raise DomainError(
                f"posterior grid mass {mass!r} is not normalized; apply normalize_grid first"
            )


def reweight_posterior(inp: PosteriorInput, new_prior: PriorSpec) -> DensityGrid:
    """Posterior under ``new_prior`` obtained by prior-ratio reweighting.

    ``new_prior`` must belong to the same family as the base prior. The
    returned grid lives on the same support and scale as the input and is
    normalized. Emits :class:`DegeneratePosteriorWarning` if fewer than 3
    support points retain non-negligible mass.
    """
    if new_prior.family is not inp.base_prior.family:
        raise DomainError(
            f"cannot reweight a {inp.base_prior.family.value} posterior with a "
            f"{new_prior.family.value} prior"
        )
    grid = inp.posterior
    values = grid.values
    keep = values >= TAIL_GUARD * values.max()

    log_base = log_density_without_jacobian(inp.base_prior, grid.support, inp.parametrization)
    if np.any(keep & (log_base < _LOG_PRIOR_FLOOR)):
        worst = float(grid.support[keep][np.argmin(log_base[keep])])
        raise ReweightingError(
            f"base prior underflows (< 1e-300) at support point {worst!r} "
            "that still carries posterior mass; the prior ratio is not computable"
        )
    log_new = log_density_without_jacobian(new_prior, grid.support, inp.parametrization)

    log_w = np.full(grid.support.shape, -np.inf)
    with np.errstate(divide="ignore"):
        log_w[keep] = np.log(values[keep]) + (log_new[keep] - log_base[keep])
    shift = log_w[keep].max()
    if not np.isfinite(shift):
        raise ReweightingError("reweighted posterior has no finite mass")
    out = np.zeros_like(values)
    out[keep] = np.exp(log_w[keep] - shift)

    result = normalize_grid(DensityGrid(grid.support, out, grid.scale))
    occupied = int(np.count_nonzero(result.values > DEGENERATE_GUARD * result.values.max()))
    if occupied < 3:
        warnings.warn(
            f"reweighted posterior mass concentrates on {occupied} support point(s); "
            "the tabulation no longer resolves the density",
            DegeneratePosteriorWarning,
            stacklevel=2,
        )
    return result


def posterior_distance(inp: PosteriorInput, new_prior: PriorSpec) -> float:
    """Hellinger distance between the reweighted and the base posterior.

    The base posterior is renormalized before the comparison: a residual
    mass defect delta would shift the Bhattacharyya coefficient by
    delta / 2, which is quadratically amplified in small distances.
    """
    reweighted = reweight_posterior(inp, new_prior)
    bc = bhattacharyya_grid(reweighted, normalize_grid(inp.posterior))
    return math.sqrt(max(0.0, 1.0 - bc))
