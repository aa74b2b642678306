"""Second-order variational calculus of spectral functions of symmetric matrices.

The package is organized around the factorization of an orthogonally
invariant function through the ordered eigenvalue map:

  symmat      eigendecompositions, eigenvalue blocks, trace-gap diagnostics
  eigderiv    directional and parabolic derivatives of eigenvalues
  symfn       pluggable symmetric functions with closed-form hooks
  spectral    the composite calculus (tangents, subgradients, critical
              cones, second subderivatives, witnesses, prox)
  oracle      brute-force difference-quotient estimators
  optimality  second-order optimality verdicts for smooth-plus-spectral sums
  cli         the verification command line (entry point: specvaran)
"""

from .errors import (
    CapabilityError,
    ConfigError,
    DomainError,
    InputError,
    InsufficientData,
    NumericalError,
    SamplerWarning,
    SpecvaranError,
)
from .symmat import (
    EigenBlockStructure,
    FanGap,
    LoadedMatrix,
    OrderedEigen,
    OrderedPairFrame,
    as_symmetric,
    block_structure,
    default_group_tol,
    eig_ordered,
    fan_gap,
    load_matrix,
    shifted_pseudoinverse,
    simultaneous_ordered_frame,
)
from .eigderiv import (
    DEFAULT_T_GRID,
    DirectionalSpectralFrame,
    directional_frame,
    expansion_residual_first,
    expansion_residual_second,
    lambda_dir,
    lambda_parabolic,
)
from .symfn import (
    MaxComponent,
    NonnegativeOrthantIndicator,
    NonpositiveOrthantIndicator,
    SpectahedronIndicator,
    SymmetricFunction,
    by_name,
    project_simplex,
    theta_critical_cone_contains,
    theta_domain_distance,
    theta_eval,
    theta_parabolic_subderivative,
    theta_second_subderivative,
    theta_subderivative,
    theta_subdifferential_contains,
)
from .spectral import (
    SpectralFunction,
    SubgradientPair,
    dist_dom_g,
    g_critical_cone_contains,
    g_eval,
    g_parabolic_subderivative,
    g_second_subderivative,
    g_subderivative,
    g_subdiff_contains,
    minimizing_parabolic_offset,
    prox_g,
    psd_critical_cone_explicit,
    second_order_direction,
    sigma_term,
    spectral_second_tangent_contains,
    spectral_tangent_contains,
    witness_direction,
)
from .oracle import (
    OracleEstimate,
    QuotientGrid,
    numeric_parabolic_subderivative,
    numeric_second_subderivative,
    numeric_subderivative,
    slope_fit,
)
from .optimality import (
    GrowthProbe,
    OptimalityReport,
    SamplerConfig,
    ScanResult,
    SmoothObjective,
    check_optimality,
    necessary_condition_scan,
    quadratic_growth_probe,
    sample_critical_directions,
    stationarity_check,
    sufficient_condition_scan,
)
from .scenarios import Scenario, load_scenario

__version__ = "0.1.0"
