"""Trace-exponential functions of 2x2 Hermitian pencils and their representing measures."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateAError,
    DomainError,
    NoConvergence,
    NotHermitianError,
    OddLengthError,
    QuadratureNoConvergence,
    RangeError,
    SizeGuardError,
    TraceExpError,
)
from .pauli import (  # noqa: E402
    HermitianMatrix2,
    Matrix2,
    adjoint,
    eigen2,
    herm_exp,
    mat_add,
    mat_mul,
    mat_scale,
    pauli_sigma,
    pauli_tau,
    sinhc,
    trace,
)
from .reduction import (  # noqa: E402
    CanonicalDecomposition,
    compute_t0,
    f_canonical,
    f_direct,
    reduce,
    traceless_split,
)
from .closed_form import (  # noqa: E402
    HybridMeasure,
    SpectralMeasure,
    bessel_I1,
    density_dhat,
    e1,
    e2,
    f_closed,
    laplace_eval,
    rho_closed,
    spectral_measure,
)
from .words import (  # noqa: E402
    DiscreteMeasure,
    PositionSet,
    atom_location,
    build_rho_N,
    convergence_table,
    enumerate_position_sets,
    eval_E_N_direct,
    eval_E_N_measure,
    gap_count,
)
from .convexity import (  # noqa: E402
    GramReport,
    check_exp_convex,
    gram_matrix,
    hadamard_and_sum_checks,
    min_eig_sym,
    sqrt_inequality_check,
)
