"""QR iteration with per-step symmetric permutations, reference QR variants,
and a Monte Carlo harness for averaged eigenvalue-error curves."""

from .ensemble import (
    EnsembleConfig,
    EnsembleReport,
    MatrixClass,
    gen_positive_definite,
    gen_symmetric,
    run_ensemble,
)
from .errors import (
    GenerationExhausted,
    InvalidMatrix,
    LengthMismatch,
    MissingTruth,
    NoConvergence,
    NotPositiveDefinite,
    OrderMismatch,
    OrderTooLarge,
    PermQRError,
    RankDeficient,
)
from .iteration import (
    BIC,
    CHOLESKY,
    CO,
    DO,
    IDENTITY,
    QR,
    QRH,
    QRS,
    Algorithm,
    Family,
    IterationState,
    IterationTrace,
    run_batch,
    run_iteration,
    step_cholesky,
    step_perm_qr,
    step_qr,
    step_qrs,
)
from .linalg import (
    EigenDecomposition,
    QrFactors,
    cholesky_upper,
    jacobi_eigen,
    qr_factor,
    tridiagonalize,
)
from .metrics import diag_vec, diagmat, dsort, error_ek
from .permutation import Permutation, permutation_matrix, sym_permute
from .strategies import Strategy, bic_select, column_order, diord, select

__version__ = "0.1.0"
