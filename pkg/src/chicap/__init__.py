"""Numerical toolkit for the chi-capacity of input-constrained channels."""

from .capacity import (
    CapacityReport,
    CertificateResult,
    SolverOptions,
    certify_optimality,
    chi_of_state,
    optimize_weights,
    solve_capacity,
)
from .channel import (
    Channel,
    apply,
    classical_channel,
    identity_channel,
    output_entropy,
    validate_channel,
)
from .density import (
    DensityMatrix,
    Projector,
    compress,
    entropy,
    relative_entropy,
    support_projector,
)
from .energy import (
    HConstraint,
    ensemble_energy_residual,
    gibbs_identity_residual,
    gibbs_state,
    h_operator_from_states,
    in_energy_ball,
    mean_energy,
)
from .ensemble import (
    Ensemble,
    SampledMeasure,
    barycenter,
    chi,
    chi_truncated,
    discretize,
    donald_residual,
    purify_ensemble,
)

__version__ = "0.1.0"
