"""Numerical analytic continuation into lune domains from partial boundary
data, via damped Cauchy kernels with verifiable convergence, tail-decay and
stability diagnostics."""

from .engine import (
    ApproachSequence,
    BoundaryData,
    ContinuationResult,
    PerOrderRecord,
    amplification_factor,
    carleman_approximation,
    contraction_ratio,
    full_boundary_check,
    limit_contraction_ratio,
    run_convergence_study,
    tail_integral,
    with_noise,
)
from .errors import DomainError, OracleFailure, SingularityError
from .geometry import (
    ApproachCurve,
    Disk,
    LuneDomain,
    ParametricCurve,
    approach_disk,
    covering_parameter,
    in_covering_disk,
    validate_lune,
    winding_number,
)
from .kernels import (
    LogComplex,
    carleman_difference,
    carleman_product,
    carleman_product_log,
    cauchy_kernel,
    kernel_log_magnitude,
    laurent_partial_sum,
)
from .oracles import (
    Preset,
    TestFunction,
    figure_lune_polyline,
    get_test_function,
    half_disk_preset,
    reference_integrate,
    standard_test_functions,
)
from .quadrature import (
    GradingSpec,
    IntegralEstimate,
    Panel,
    QuadratureConfig,
    graded_mesh,
    integrate_contour,
)

__version__ = "0.1.0"
