"""Selective linear-optics cloning of Gaussian states in the moment picture."""

from .cloning import (
    ClonerConfig,
    CloneResult,
    clone_moments_closed_form,
    gain_select,
    phase_flip,
    run_averaged,
    run_single_shot,
)
from .detection import (
    CommEstimate,
    HomodyneDetector,
    average_error_probability,
    error_curve,
    error_prob_given_z,
    homodyne_x_marginal,
)
from .fidelity import (
    FidelityReport,
    enhancement,
    gaussian_fidelity,
    maximize_fidelity_numeric,
    optimal_ancilla_squeezing,
    symmetric_cloning_fidelity,
)
from .gaussian import (
    GaussianMeasurement,
    GaussianState,
    SymplecticOp,
    apply_symplectic,
    average_feedforward,
    bs_symplectic,
    coherent,
    displace,
    measure_mode,
    outcome_density,
    partial_trace,
    sample_outcome,
    squeezed_coherent,
    squeezed_thermal,
    tensor,
    vacuum,
)

__version__ = "0.1.0"
