"""Generalized Dirichlet-to-Neumann maps on the half-line.

Computes the unknown boundary derivatives of solutions to
q_t + omega(-i d/dx) q = 0 on x > 0 from the initial profile and a
complement of given boundary derivatives, for polynomial dispersion
omega.  Monomial dispersion uses the explicit Gamma-kernel form
(`theorem_one_map`); general polynomial dispersion up to degree five
uses spectral-root contour quadrature (`theorem_two_map`).
"""

from .errors import (
    ConfigError,
    ConstraintError,
    ConvergenceError,
    DnmapError,
    DomainError,
    GeometryError,
    ModeError,
    NumericalError,
    RefinementError,
    UnsupportedConfigurationError,
)
from .general import (
    ContourBranches,
    ContourLeg,
    ContourSpec,
    PVWindow,
    ResidueQuotientTable,
    TimeTransform,
    build_contours,
    pv_ray_integral,
    q0_general_term,
    residue_corrections,
    theorem_two_map,
)
from .geometry import SectorDecomposition, sector_decomposition, zeros_of_omega
from .model import (
    BoundaryValueProblem,
    CallableSignal,
    DispersionPolynomial,
    DNMapResult,
    InitialData,
    SampledSignal,
    Signal,
    Violation,
    normalize_leading,
    unknown_count,
    validate_dispersion,
    validate_problem,
)
from .monomial import lambda_table, theorem_one_map
from .quadrature import abel_integral, half_line_transform

__all__ = [
    "BoundaryValueProblem",
    "CallableSignal",
    "ConfigError",
    "ConstraintError",
    "ContourBranches",
    "ContourLeg",
    "ContourSpec",
    "ConvergenceError",
    "DispersionPolynomial",
    "DnmapError",
    "DNMapResult",
    "DomainError",
    "GeometryError",
    "InitialData",
    "ModeError",
    "NumericalError",
    "PVWindow",
    "RefinementError",
    "ResidueQuotientTable",
    "SampledSignal",
    "SectorDecomposition",
    "Signal",
    "TimeTransform",
    "UnsupportedConfigurationError",
    "Violation",
    "abel_integral",
    "build_contours",
    "half_line_transform",
    "lambda_table",
    "normalize_leading",
    "pv_ray_integral",
    "q0_general_term",
    "residue_corrections",
    "sector_decomposition",
    "theorem_one_map",
    "theorem_two_map",
    "unknown_count",
    "validate_dispersion",
    "validate_problem",
    "zeros_of_omega",
]

__version__ = "0.1.0"
