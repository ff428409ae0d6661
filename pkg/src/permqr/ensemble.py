"""Random matrix ensembles and averaged error curves.

Every matrix draws from its own stream seeded by ``(seed, index)``, so a
report depends only on the configuration.  All algorithms run on the same
matrices; a matrix on which any algorithm fails is dropped from every
average.
"""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .errors import GenerationExhausted, NoConvergence, OrderTooLarge
from .iteration import BIC, CO, DO, QR, QRH, QRS, Algorithm, run_batch
from .linalg import jacobi_eigen, symmetrize
from .strategies import BIC_MAX_ORDER, Strategy

MAX_REJECTIONS = 1000
DEFAULT_ALGORITHMS = (QR, QRH, QRS, DO, CO, BIC)


class MatrixClass(Enum):
    SYMMETRIC = "sym"
    POSITIVE_DEFINITE = "pd"
    # test hook: random diagonal matrices, on which every method is exact
    DIAGONAL = "diagonal"

    @classmethod
    def parse(cls, text):
        t = str(text).strip().lower()
        aliases = {"symmetric": "sym", "positive_definite": "pd", "positive-definite": "pd"}
        return cls(aliases.get(t, t))


@dataclass(frozen=True)
class EnsembleConfig:
    order: int = 4
    count: int = 1000
    iterations: int = 50
    matrix_class: MatrixClass = MatrixClass.POSITIVE_DEFINITE
    algorithms: tuple = DEFAULT_ALGORITHMS
    seed: int = 0
    threshold: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "matrix_class", MatrixClass.parse(
            self.matrix_class.value if isinstance(self.matrix_class, MatrixClass) else self.matrix_class))
        algs = tuple(a if isinstance(a, Algorithm) else Algorithm.parse(a) for a in self.algorithms)
        object.__setattr__(self, "algorithms", algs)
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not algs:
            raise ValueError("at least one algorithm is required")
        labels = [a.label for a in algs]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate algorithms: {labels}")
        if self.seed < 0 or self.seed >= 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not self.threshold >= 0:
            raise ValueError("threshold must be >= 0")
        if self.order > BIC_MAX_ORDER and any(a.strategy is Strategy.BIC for a in algs):
            raise OrderTooLarge(f"BIC needs order <= {BIC_MAX_ORDER}")


@dataclass(eq=False)
class EnsembleReport:
    config: EnsembleConfig
    means: dict
    included: int
    excluded: int
    rejected: int
    failures: dict = field(default_factory=dict)

    @property
    def labels(self):
        return [a.label for a in self.config.algorithms]


def matrix_stream(seed, index):
    """Generator for ensemble member ``index``."""
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def _candidate(matrix_class, order, rng):
    if matrix_class is MatrixClass.SYMMETRIC:
        m = rng.standard_normal((order, order))
        return (m + m.T) / 2
    if matrix_class is MatrixClass.POSITIVE_DEFINITE:
        m = rng.standard_normal((order, order))
        return symmetrize(m.T @ m)
    return np.diag(rng.standard_normal(order))


def draw(matrix_class, order, rng, threshold=1e-6):
    """Draw one accepted matrix; returns ``(matrix, eigendecomposition, rejections)``.

    Candidates whose smallest eigenvalue magnitude (by Jacobi) is below
    ``threshold`` are rejected and redrawn.
    """
    matrix_class = MatrixClass.parse(matrix_class.value if isinstance(matrix_class, MatrixClass) else matrix_class)
    for rejected in range(MAX_REJECTIONS):
        a = _candidate(matrix_class, order, rng)
        try:
            eig = jacobi_eigen(a)
        except NoConvergence:
            continue
        if np.min(np.abs(eig.values)) >= threshold:
            return a, eig, rejected
    raise GenerationExhausted(f"{MAX_REJECTIONS} consecutive draws rejected at threshold {threshold:g}")


def gen_symmetric(order, rng, threshold=1e-6):
    """``(M + M^T)/2`` with standard normal ``M``; definite or indefinite."""
    return draw(MatrixClass.SYMMETRIC, order, rng, threshold)[0]


def gen_positive_definite(order, rng, threshold=1e-6):
    """``M^T M`` with standard normal ``M``."""
    return draw(MatrixClass.POSITIVE_DEFINITE, order, rng, threshold)[0]


def generate(cfg):
    """All ensemble members: ``(matrices, eigendecompositions, rejected)``."""
    mats, eigs, rejected = [], [], 0
    for i in range(cfg.count):
        a, eig, r = draw(cfg.matrix_class, cfg.order, matrix_stream(cfg.seed, i), cfg.threshold)
        mats.append(a)
        eigs.append(eig)
        rejected += r
    return np.array(mats).reshape(cfg.count, cfg.order, cfg.order), eigs, rejected


def run_ensemble(cfg, matrices=None):
    """Average ``E_k^2`` over the ensemble for every configured algorithm.

    ``matrices`` optionally replaces the random draw (a stack of symmetric
    matrices); ground truth is then computed for them by Jacobi.
    """
    if matrices is None:
        mats, eigs, rejected = generate(cfg)
    else:
        mats = np.asarray(matrices, dtype=float)
        eigs = [jacobi_eigen(a) for a in mats]
        rejected = 0
    values = [e.values for e in eigs]

    results = [run_batch(mats, alg, cfg.iterations, values) for alg in cfg.algorithms]
    failed = np.zeros(len(mats), dtype=bool)
    for res in results:
        failed |= np.array([f is not None for f in res.failures])
    keep = np.flatnonzero(~failed)

    means = {}
    for alg, res in zip(cfg.algorithms, results):
        if len(keep) == 0:
            means[alg.label] = np.full(cfg.iterations + 1, np.nan)
            continue
        kept = res.errors[keep]
        means[alg.label] = np.array([math.fsum(col) / len(keep) for col in kept.T])
    failures = {alg.label: sum(f is not None for f in res.failures)
                for alg, res in zip(cfg.algorithms, results)}
    return EnsembleReport(cfg, means, len(keep), int(failed.sum()), rejected, failures)


def first_crossing(curve, threshold):
    """First ``k`` with ``curve[k] < threshold``, or None."""
    below = np.flatnonzero(np.asarray(curve) < threshold)
    return int(below[0]) if below.size else None


def speedup_ratio(report, label, reference="QR"):
    """Iterations ``label`` needs to reach the reference's final error, over
    the reference's iteration count.  None if it never gets there."""
    ref = report.means[reference]
    k = first_crossing(report.means[label], ref[-1])
    return None if k is None else k / (len(ref) - 1)

