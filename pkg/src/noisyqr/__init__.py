"""Condition-number growth bounds for column-appended matrices, with the
probability theory of orthogonalization under Gaussian noise and a seeded
Monte Carlo harness that checks every formula against the experiments."""

from ._backend import BACKEND
from .bounds import (
    BoundReport,
    ChainBoundReport,
    growth_factor,
    kappa_bound_eps,
    kappa_bound_eps_scalar,
    kappa_bound_general,
    kappa_bound_general_scalar,
    kappa_bound_unit_columns,
    kappa_bound_unit_q,
    kappa_bound_via_q,
    kappa_growth_prob,
    liesen_kappa_from_residual,
    liesen_residual_from_kappa,
    liesen_residual_identity_check,
    minmax_singular_bounds,
    printed_growth_factor,
    qr_chain_bound,
    rank2_eigenvalues,
    residual_tail_prob,
)
from .errors import (
    ConvergenceError,
    DomainError,
    MatrixFormatError,
    NoisyQrError,
    PreconditionError,
    RankDeficiencyError,
)
from .linalg import (
    QrFactors,
    append_column,
    cond,
    householder_qr,
    load_matrix_csv,
    load_vector_csv,
    ls_residual,
    mgs_qr,
    orthonormal_complement,
    project_onto,
    project_perp,
    save_matrix_csv,
    singular_values,
)
from .sim import (
    ExperimentConfig,
    NoisyQrReport,
    ProjectionReport,
    TrialSummary,
    gaussian_vector,
    ls_residual_experiment,
    make_unit_column_matrix,
    noisy_qr_experiment,
    norm_tail_experiment,
    norm_tail_sweep,
    philox_stream,
    projection_noise_experiment,
    reproduce_figure_data,
)
from .specfun import (
    TailProbability,
    bessel_i,
    log_gamma,
    marcum_q,
    noncentral_chi2_cdf,
    noncentral_f_sf,
    norm_tail_prob,
    regularized_incomplete_beta,
    regularized_upper_gamma,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundReport",
    "ChainBoundReport",
    "ConvergenceError",
    "DomainError",
    "ExperimentConfig",
    "MatrixFormatError",
    "NoisyQrError",
    "NoisyQrReport",
    "PreconditionError",
    "ProjectionReport",
    "QrFactors",
    "RankDeficiencyError",
    "TailProbability",
    "TrialSummary",
    "append_column",
    "bessel_i",
    "cond",
    "gaussian_vector",
    "growth_factor",
    "householder_qr",
    "kappa_bound_eps",
    "kappa_bound_eps_scalar",
    "kappa_bound_general",
    "kappa_bound_general_scalar",
    "kappa_bound_unit_columns",
    "kappa_bound_unit_q",
    "kappa_bound_via_q",
    "kappa_growth_prob",
    "liesen_kappa_from_residual",
    "liesen_residual_from_kappa",
    "liesen_residual_identity_check",
    "load_matrix_csv",
    "load_vector_csv",
    "log_gamma",
    "ls_residual",
    "ls_residual_experiment",
    "make_unit_column_matrix",
    "marcum_q",
    "mgs_qr",
    "minmax_singular_bounds",
    "noisy_qr_experiment",
    "noncentral_chi2_cdf",
    "noncentral_f_sf",
    "norm_tail_experiment",
    "norm_tail_prob",
    "norm_tail_sweep",
    "orthonormal_complement",
    "philox_stream",
    "printed_growth_factor",
    "project_onto",
    "project_perp",
    "projection_noise_experiment",
    "qr_chain_bound",
    "rank2_eigenvalues",
    "regularized_incomplete_beta",
    "regularized_upper_gamma",
    "reproduce_figure_data",
    "residual_tail_prob",
    "save_matrix_csv",
    "singular_values",
]
