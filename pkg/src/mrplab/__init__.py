"""mrplab: a simulation and verification laboratory for mixed renewal
counting processes.

Build a model from a mixing law, a parameter map, and an interarrival
kernel; simulate path ensembles reproducibly; test whether the multinomial
increment property, the Markov property, and mixed-Poisson-ness hold and
whether they agree as the regularity conditions say they must.
"""

from .errors import (
    IncompletePathError,
    InjectivityError,
    InsufficientDataError,
    InsufficientMassError,
    MrpLabError,
    NoDensityError,
    NullSetError,
    NumericError,
    OutOfHorizonError,
    ParameterError,
    RegularityViolationError,
    RejectedInputError,
)
from .kernels import (
    AffineMap,
    DETERMINISTIC_UNIT,
    DiracMixing,
    EXPONENTIAL,
    Family,
    GEN_GAMMA_HALF,
    GammaMixing,
    IdentityMap,
    InterarrivalKernel,
    MappedMixing,
    MixingLaw,
    PARETO_UNIT_SHAPE,
    ParameterMap,
    ReciprocalMap,
    UniformMixing,
    hazard_at_zero_numeric,
    kernel_for,
)
from .model import (
    ConsistencyReport,
    KernelEqualityReport,
    MrpModel,
    PathEnsemble,
    PathEvent,
    PRESET_NAMES,
    check_consistency,
    ensemble_from_text,
    ensemble_to_text,
    kernel_equality_check,
    model_from_config,
    model_to_config,
    parse_config_text,
    preset,
    reparameterize,
    sample_ensemble,
    sample_path,
)
from .process import (
    ArrivalPath,
    PartitionQuery,
    arrival_of,
    build_path,
    count_at,
    increments,
    path_from_text,
    path_to_text,
)
from .properties import (
    Estimate,
    IdentityReport,
    MppReport,
    RegularityReport,
    TestReport,
    VerdictConfig,
    VerdictReport,
    integral_identities_check,
    markov_test,
    mpp_check,
    multinomial_rhs,
    multinomial_test,
    regularity_check,
    theorem_verdict,
)
from .stats import (
    EmpiricalSample,
    chi_square_p,
    fisher_combine,
    kolmogorov_critical,
    kolmogorov_sf,
    ks_distance,
    ks_two_sample,
    normal_two_sided_p,
    two_proportion_z,
    wilson_ci,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "MrpLabError",
    "RejectedInputError",
    "IncompletePathError",
    "OutOfHorizonError",
    "ParameterError",
    "NoDensityError",
    "RegularityViolationError",
    "NullSetError",
    "InjectivityError",
    "InsufficientMassError",
    "InsufficientDataError",
    "NumericError",
    # kernels and mixing
    "Family",
    "InterarrivalKernel",
    "kernel_for",
    "EXPONENTIAL",
    "PARETO_UNIT_SHAPE",
    "GEN_GAMMA_HALF",
    "DETERMINISTIC_UNIT",
    "hazard_at_zero_numeric",
    "MixingLaw",
    "GammaMixing",
    "UniformMixing",
    "DiracMixing",
    "MappedMixing",
    "ParameterMap",
    "AffineMap",
    "ReciprocalMap",
    "IdentityMap",
    # paths
    "ArrivalPath",
    "PartitionQuery",
    "build_path",
    "count_at",
    "arrival_of",
    "increments",
    "path_to_text",
    "path_from_text",
    # models and ensembles
    "MrpModel",
    "PathEnsemble",
    "PathEvent",
    "PRESET_NAMES",
    "preset",
    "model_to_config",
    "model_from_config",
    "parse_config_text",
    "sample_ensemble",
    "sample_path",
    "reparameterize",
    "check_consistency",
    "ConsistencyReport",
    "kernel_equality_check",
    "KernelEqualityReport",
    "ensemble_to_text",
    "ensemble_from_text",
    # property tests
    "Estimate",
    "TestReport",
    "MppReport",
    "RegularityReport",
    "IdentityReport",
    "VerdictConfig",
    "VerdictReport",
    "multinomial_rhs",
    "multinomial_test",
    "markov_test",
    "mpp_check",
    "regularity_check",
    "integral_identities_check",
    "theorem_verdict",
    # statistics
    "EmpiricalSample",
    "ks_distance",
    "ks_two_sample",
    "kolmogorov_sf",
    "kolmogorov_critical",
    "chi_square_p",
    "wilson_ci",
    "two_proportion_z",
    "normal_two_sided_p",
    "fisher_combine",
]
