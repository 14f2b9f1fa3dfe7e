"""Local sensitivity of Bayesian posteriors to prior hyperparameter choice.

The package traces the set of priors at a fixed Hellinger distance epsilon
from a base prior (a contour in the two-parameter hyperplane), reweights a
base posterior to each contour prior without re-fitting, and summarizes the
induced posterior movement as a worst-case sensitivity ratio. A calibration
map translates Hellinger distances into mean shifts of a unit-variance
normal so the numbers have an interpretable scale. For the conjugate
random-walk smoothing model the posterior distances are also available in
closed form, which doubles as an oracle for the reweighting route.
"""

from .calibration import (
    SATURATION_H,
    CalibratedValue,
    calibrate,
    calibrate_value,
    calibrated_ratio,
    inverse_calibrate,
)
from .contour import (
    RESIDUAL_RTOL,
    CardinalModuli,
    GridPoint,
    PolarGrid,
    compute_grid,
    preexplore,
    scaling_factors,
    solve_radius,
)
from .errors import (
    AlignmentError,
    ContourUnreachableError,
    DegeneratePosteriorWarning,
    DomainError,
    IngestionError,
    NumericalError,
    PartialGridError,
    PriorScanError,
    ReweightingError,
    SaturatedCalibrationWarning,
)
from .families import (
    Family,
    ParamPoint,
    PriorSpec,
    eval_prior_density,
    hellinger_analytic,
    hellinger_gamma,
    hellinger_normal,
    log_prior_density,
    tabulate_prior,
    validate_point,
)
from .grids import (
    DensityGrid,
    Scale,
    bhattacharyya_grid,
    common_support,
    hellinger_grid,
    normalize_grid,
    read_density_csv,
    trapezoid_mass,
    write_density_csv,
)
from .reweight import TAIL_GUARD, PosteriorInput, posterior_distance, reweight_posterior
from .rw1 import (
    DEFAULT_PRIOR,
    RW1Model,
    exact_posterior_hellinger,
    exact_sensitivity,
    ingest_timeseries,
    log_unnormalized_posterior,
    logdet_q,
    normconst,
    quad_term,
    rw1_eigenvalues,
    structure_matrix,
    tabulate_posterior,
    tridiagonal_solve,
)
from .sensitivity import (
    REFERENCE_LEVELS,
    SensitivityEntry,
    SensitivityResult,
    assemble_result,
    circular_sensitivity,
    export_plot_data,
    result_to_json_dict,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "CalibratedValue",
    "CardinalModuli",
    "ContourUnreachableError",
    "DEFAULT_PRIOR",
    "DegeneratePosteriorWarning",
    "DensityGrid",
    "DomainError",
    "Family",
    "GridPoint",
    "IngestionError",
    "NumericalError",
    "ParamPoint",
    "PartialGridError",
    "PolarGrid",
    "PosteriorInput",
    "PriorScanError",
    "PriorSpec",
    "REFERENCE_LEVELS",
    "RESIDUAL_RTOL",
    "ReweightingError",
    "RW1Model",
    "SATURATION_H",
    "SaturatedCalibrationWarning",
    "Scale",
    "SensitivityEntry",
    "SensitivityResult",
    "TAIL_GUARD",
    "assemble_result",
    "bhattacharyya_grid",
    "calibrate",
    "calibrate_value",
    "calibrated_ratio",
    "circular_sensitivity",
    "common_support",
    "compute_grid",
    "eval_prior_density",
    "exact_posterior_hellinger",
    "exact_sensitivity",
    "export_plot_data",
    "hellinger_analytic",
    "hellinger_gamma",
    "hellinger_grid",
    "hellinger_normal",
    "ingest_timeseries",
    "inverse_calibrate",
    "log_prior_density",
    "log_unnormalized_posterior",
    "logdet_q",
    "normalize_grid",
    "normconst",
    "posterior_distance",
    "preexplore",
    "quad_term",
    "read_density_csv",
    "result_to_json_dict",
    "reweight_posterior",
    "rw1_eigenvalues",
    "scaling_factors",
    "solve_radius",
    "structure_matrix",
    "summarize",
    "tabulate_posterior",
    "tabulate_prior",
    "trapezoid_mass",
    "tridiagonal_solve",
    "validate_point",
    "write_density_csv",
]
