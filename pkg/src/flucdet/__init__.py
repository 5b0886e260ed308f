"""Functional determinants of one-dimensional fluctuation operators.

The package computes determinants of K = -d^2/dt^2 - Omega^2(t) on a finite
interval under Dirichlet, periodic, and antiperiodic boundary conditions.
The closed-form route assembles endpoint data of two homogeneous solutions;
independent oracles (lattice spectra, determinant recurrences, a coupling
flow driven by Green-function traces, and an amplitude-phase route) cross
check every result.
"""

from .errors import (
    ConfigError,
    DegenerateOperatorError,
    FlucdetError,
    IntegrationError,
    ProfileError,
    ShootingError,
    VerificationError,
)
from .profiles import (
    FrequencyProfile,
    Interval,
    SyntheticZeroModeSpec,
    ZeroModeData,
    builtin_zero_mode_spec,
    make_constant_profile,
    make_modulated_profile,
    make_user_profile,
    make_zero_mode_profile,
    profile_from_config,
    profile_to_config,
    sample_profile,
    shifted_profile,
)
from .odesolve import (
    CANONICAL,
    CLASSICAL_PATH,
    ErmakovSolution,
    HomogeneousBasis,
    Solution,
    make_basis,
    mix_basis,
    solve_ermakov,
    solve_homogeneous,
    wronskian_drift,
)
from .green import (
    BC_ANTIPERIODIC,
    BC_DIRICHLET,
    BC_PERIODIC,
    BOUNDARY_CONDITIONS,
    EndpointMatrix,
    GreenKernel,
    PairFunction,
    build_kernel,
    dirichlet_kernel,
    endpoint_det_dirichlet,
    endpoint_det_wrapped,
    endpoint_matrix,
    f_function,
    periodic_kernel,
    retarded_green,
    trace_omega_sq,
    trace_weighted_diagonal,
)
from .determinants import (
    DetResult,
    WrappedZeroModeReport,
    ZeroModeReport,
    det_antiperiodic,
    det_dirichlet,
    det_dirichlet_regularized,
    det_periodic,
    det_periodic_regularized,
    determinant,
    endpoint_log_det,
    free_reference,
    log_det_slope_fd,
    trace_identity_residual,
    van_vleck_check,
    wrapped_difference_quotient,
)
from .ermakov import (
    basis_from_pq,
    det_ratio_dirichlet_pq,
    det_ratio_periodic_pq,
)
from .oracle import (
    LatticeOperator,
    SpectrumReport,
    build_lattice,
    count_nonpositive,
    gflow_ratio,
    lattice_determinant_scaled,
    lattice_eigenvalues_scaled,
    lattice_ratio,
    lattice_ratio_richardson,
    pseudo_det_ratio,
    reference_eigenvalues_scaled,
)

__version__ = "0.1.0"

__all__ = [
    "BC_ANTIPERIODIC",
    "BC_DIRICHLET",
    "BC_PERIODIC",
    "BOUNDARY_CONDITIONS",
    "CANONICAL",
    "CLASSICAL_PATH",
    "ConfigError",
    "DegenerateOperatorError",
    "DetResult",
    "EndpointMatrix",
    "ErmakovSolution",
    "FlucdetError",
    "FrequencyProfile",
    "GreenKernel",
    "HomogeneousBasis",
    "IntegrationError",
    "Interval",
    "LatticeOperator",
    "PairFunction",
    "ProfileError",
    "ShootingError",
    "Solution",
    "SpectrumReport",
    "SyntheticZeroModeSpec",
    "VerificationError",
    "WrappedZeroModeReport",
    "ZeroModeData",
    "ZeroModeReport",
    "basis_from_pq",
    "build_kernel",
    "build_lattice",
    "builtin_zero_mode_spec",
    "count_nonpositive",
    "det_antiperiodic",
    "det_dirichlet",
    "det_dirichlet_regularized",
    "det_periodic",
    "det_periodic_regularized",
    "det_ratio_dirichlet_pq",
    "det_ratio_periodic_pq",
    "determinant",
    "dirichlet_kernel",
    "endpoint_det_dirichlet",
    "endpoint_det_wrapped",
    "endpoint_log_det",
    "endpoint_matrix",
    "f_function",
    "free_reference",
    "gflow_ratio",
    "lattice_determinant_scaled",
    "lattice_eigenvalues_scaled",
    "lattice_ratio",
    "lattice_ratio_richardson",
    "log_det_slope_fd",
    "make_basis",
    "make_constant_profile",
    "make_modulated_profile",
    "make_user_profile",
    "make_zero_mode_profile",
    "mix_basis",
    "periodic_kernel",
    "profile_from_config",
    "profile_to_config",
    "pseudo_det_ratio",
    "reference_eigenvalues_scaled",
    "retarded_green",
    "sample_profile",
    "shifted_profile",
    "solve_ermakov",
    "solve_homogeneous",
    "trace_identity_residual",
    "trace_omega_sq",
    "trace_weighted_diagonal",
    "van_vleck_check",
    "wrapped_difference_quotient",
    "wronskian_drift",
]
