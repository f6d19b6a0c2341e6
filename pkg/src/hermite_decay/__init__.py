"""Stable Hermite function evaluation, weighted decay sums, and
harmonic-oscillator decay certificates."""

__version__ = "0.1.0"

from hermite_decay.hermite_core import (
    SignedLog,
    PhiCoordinate,
    hermite_exact,
    hermite_orders,
    hermite_batch,
    hermite_values,
    phi_coordinate,
    plancherel_rotach_estimate,
    hermite_pr_bound,
)
from hermite_decay.decay_sum import (
    SumParams,
    ArgumentProfile,
    SharpnessCertificate,
    argument_function,
    argument_derivatives,
    check_second_derivative_inequality,
    find_nmax,
    direct_sum,
    tail_bound,
    envelope,
    sharpness_certificate,
)
from hermite_decay.oscillator import (
    HermiteCoefficients,
    DecayCertificate,
    QuadratureSpec,
    expand,
    gaussian_coefficients,
    synthetic_envelope_coefficients,
    vemuri_decay_check,
    vemuri_envelope,
    evolve,
    evolve_grid,
    weighted_sup,
    decay_certificate,
)
from hermite_decay.cli_report import (
    GridSpec,
    SweepConfig,
    SweepReport,
    run,
    calibrate,
)

__all__ = [
    "SignedLog",
    "PhiCoordinate",
    "hermite_exact",
    "hermite_orders",
    "hermite_batch",
    "hermite_values",
    "phi_coordinate",
    "plancherel_rotach_estimate",
    "hermite_pr_bound",
    "SumParams",
    "ArgumentProfile",
    "SharpnessCertificate",
    "argument_function",
    "argument_derivatives",
    "check_second_derivative_inequality",
    "find_nmax",
    "direct_sum",
    "tail_bound",
    "envelope",
    "sharpness_certificate",
    "HermiteCoefficients",
    "DecayCertificate",
    "QuadratureSpec",
    "expand",
    "gaussian_coefficients",
    "synthetic_envelope_coefficients",
    "vemuri_decay_check",
    "vemuri_envelope",
    "evolve",
    "evolve_grid",
    "weighted_sup",
    "decay_certificate",
    "GridSpec",
    "SweepConfig",
    "SweepReport",
    "run",
    "calibrate",
    "__version__",
]
