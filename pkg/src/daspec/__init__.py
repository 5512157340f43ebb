"""Data spectroscopic clustering (DaSpec) and its verification toolkit.

The estimator counts the eigenvectors of the 1/n-normalized radial kernel
matrix that have no sign change up to a data-driven precision; each such
eigenvector witnesses one separable high-density component.  The package
also ships closed-form spectra for solvable cases, numerical checkers for
the supporting perturbation bounds, seeded benchmark generators, and
k-means / normalized-spectral baselines behind one CLI.
"""

from .analytic import (
    GaussianOperatorSpec,
    analytic_eigenfunction,
    analytic_eigenvalue,
    exponential_top_eigenfunction,
    hermite,
)
from .baselines import kmeans, njw_spectral
from .clustering import (
    ClusterResult,
    DaSpecParams,
    chi_square_quantile,
    classify,
    cluster,
    has_no_sign_change,
    select_bandwidth,
    select_epsilon,
)
from .datagen import (
    Gaussian,
    MixtureSpec,
    PointMass,
    Ring,
    RingSpec,
    gen_gaussian_mixture,
    gen_ring_suite,
)
from .errors import DaspecError, DegenerateDataError, InputError, NumericalError
from .kernels import (
    EIGENVALUE_FLOOR,
    DataSet,
    KernelSpec,
    extend_eigenfunction,
    kernel_eval,
    kernel_matrix,
    pairwise_distances,
)
from .linalg import EigenSystem, eigendecompose, validate_symmetric
from .theory import (
    CheckReport,
    OverlapEstimate,
    PerturbationReport,
    check_compact_bound,
    check_eigenfunction_perturbation,
    check_interleaving,
    check_tail_bound,
    check_top_eigenvalue_bound,
    compute_r,
    eigenvector_component_mass,
)

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "ClusterResult",
    "DaSpecParams",
    "DaspecError",
    "DataSet",
    "DegenerateDataError",
    "EIGENVALUE_FLOOR",
    "EigenSystem",
    "Gaussian",
    "GaussianOperatorSpec",
    "InputError",
    "KernelSpec",
    "MixtureSpec",
    "NumericalError",
    "OverlapEstimate",
    "PerturbationReport",
    "PointMass",
    "Ring",
    "RingSpec",
    "analytic_eigenfunction",
    "analytic_eigenvalue",
    "check_compact_bound",
    "check_eigenfunction_perturbation",
    "check_interleaving",
    "check_tail_bound",
    "check_top_eigenvalue_bound",
    "chi_square_quantile",
    "classify",
    "cluster",
    "compute_r",
    "eigendecompose",
    "eigenvector_component_mass",
    "exponential_top_eigenfunction",
    "extend_eigenfunction",
    "gen_gaussian_mixture",
    "gen_ring_suite",
    "has_no_sign_change",
    "hermite",
    "kernel_eval",
    "kernel_matrix",
    "kmeans",
    "njw_spectral",
    "pairwise_distances",
    "select_bandwidth",
    "select_epsilon",
    "validate_symmetric",
]
