"""Finite-scale reproducing-kernel toolkit.

Kernels and their Gram matrices, feature-map factorizations, weighted
point measures, the discretized integral operator with its Mercer
expansion, and closed-form bases for the polynomial and Gaussian kernels.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DimensionMismatchError,
    DuplicatePointError,
    FactorizationError,
    HostMismatchError,
    KernelParseError,
    MeasureError,
    MercerKitError,
    NonHermitianError,
    NotPositiveSemidefiniteError,
    PreconditionError,
    RangeInclusionError,
    UnknownPointError,
    UsageError,
)
from .kernels import (
    Conjugated,
    Gaussian,
    GramMatrix,
    Identity,
    Kernel,
    RankOne,
    Scaled,
    Sum,
    Tabulated,
    Weyl,
    check_hermitian,
    check_psd,
    check_schwarz,
    cross_gram,
    evaluate,
    gram,
    parse_kernel,
)
from .linalg import (
    EigenDecomposition,
    douglas_factor,
    eigh,
    isometric_factor,
    pinv,
    psd_sqrt,
    schatten_norms,
    schmidt_decomposition,
    singular_values,
)
from .measures import (
    DiscreteMeasure,
    integrate,
    l2_inner,
    l2_norm,
    load_measure,
    monte_carlo_box,
    save_measure,
    uniform_grid,
)
from .rkhs import (
    FeatureMap,
    FiniteRkhs,
    InclusionResult,
    MembershipResult,
    RkhsElement,
    aronszajn_inclusion,
    build,
    connect_linearisations,
    inner,
    membership,
    minimal_linearisation,
    recover_from_onb,
    reproduce,
)
from .mercer import (
    IteratedKernelResult,
    MercerReport,
    NystromOperator,
    SpectralDecomposition,
    SpectralMembershipResult,
    assemble,
    converse_psd_check,
    dini_remainders,
    hs_check,
    iterated_kernel,
    mercer_partial_sum,
    nystrom_extend,
    reconstruction_errors,
    spectral_membership,
    spectrum,
    trace_check,
)
from .bases import (
    GaussBasis,
    MultiIndex,
    WeylBasis,
    enumerate_multiindices,
    gauss_basis_eval,
    gauss_inner,
    gauss_partial_reconstruction,
    weyl_basis_eval,
    weyl_inner,
)

__all__ = [name for name in dir() if not name.startswith("_")]
