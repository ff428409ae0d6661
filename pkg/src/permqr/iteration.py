"""Stepping functions for the QR-type iterations and a trace-producing driver.

Families:

* ``QR``        classical unshifted QR iteration.
* ``QRH``       QR after reduction to tridiagonal form.
* ``QRS``       QRH with the shift ``s = a[N, N]`` (no deflation).
* ``CHOLESKY``  ``B -> R R^T`` with ``R`` the Cholesky factor of ``B``,
                started from ``B0 = A^2``.
* ``PERM_QR``   QR applied to ``P_k A_k P_k^T``, ``P_k`` from a strategy.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import PermQRError, RankDeficient
from .linalg import (
    EigenDecomposition,
    as_symmetric,
    cholesky_upper,
    householder_qr,
    jacobi_eigen,
    matmul,
    max_abs,
    qr_step,
    rank_ok,
    symmetrize,
    tridiagonalize,
)
from .metrics import batch_error, diag_vec, dsort, error_ek
from .permutation import sym_permute
from .strategies import Strategy, select, select_batch

SHIFT_PERTURBATION = 1e-8


class Family(Enum):
    QR = "QR"
    QRH = "QRH"
    QRS = "QRS"
    CHOLESKY = "CHOLESKY"
    PERM_QR = "PERM_QR"


@dataclass(frozen=True)
class Algorithm:
    family: Family
    strategy: Optional[Strategy] = None

    def __post_init__(self):
        if (self.family is Family.PERM_QR) != (self.strategy is not None):
            raise ValueError("PERM_QR takes exactly one strategy; other families take none")

    @property
    def label(self):
        """Legend label: QR, QRH, QRS, CHOLESKY, DO, CO, BIC or IDENTITY."""
        if self.strategy is not None:
            return self.strategy.value
        return self.family.value

    @classmethod
    def parse(cls, text):
        """Parse ``qr``, ``do``, ``PERM_QR(CO)``, ``identity`` ... (case-insensitive)."""
        t = text.strip().upper().replace(" ", "")
        if t.startswith("PERM_QR(") and t.endswith(")"):
            t = t[len("PERM_QR("):-1]
        if t in Family.__members__ and t != "PERM_QR":
            return cls(Family[t])
        if t in Strategy.__members__:
            return cls(Family.PERM_QR, Strategy[t])
        raise ValueError(f"unknown algorithm {text!r}")

    def __str__(self):
        return self.label


QR = Algorithm(Family.QR)
QRH = Algorithm(Family.QRH)
QRS = Algorithm(Family.QRS)
CHOLESKY = Algorithm(Family.CHOLESKY)
DO = Algorithm(Family.PERM_QR, Strategy.DO)
CO = Algorithm(Family.PERM_QR, Strategy.CO)
BIC = Algorithm(Family.PERM_QR, Strategy.BIC)
IDENTITY = Algorithm(Family.PERM_QR, Strategy.IDENTITY)


@dataclass(frozen=True, eq=False)
class IterationState:
    """Iterate ``a`` after ``k`` steps with accumulated orthonormal factor ``v``.

    For QR-type families ``v.T @ a0 @ v == a``.  The Cholesky iteration has
    no orthonormal factor and carries ``v = None``; its ``a`` is ``B_k``.
    """

    k: int
    a: np.ndarray
    v: Optional[np.ndarray]
    shift: float = 0.0


@dataclass(frozen=True)
class StepFailure:
    step: int
    kind: str
    message: str

    def __str__(self):
        return f"step {self.step}: {self.kind}: {self.message}"


@dataclass(eq=False)
class IterationTrace:
    algorithm: Algorithm
    states: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    tag: Optional[str] = None
    failure: Optional[StepFailure] = None

    @property
    def ok(self):
        return self.failure is None

    @property
    def final(self):
        return self.states[-1]


def initial_state(a0):
    a0 = as_symmetric(a0)
    return IterationState(0, a0, np.eye(a0.shape[0]))


def step_qr(s):
    """``a -> r @ q`` where ``a = q @ r``; ``v -> v @ q``."""
    nxt, q, ok = qr_step(s.a)
    if not ok:
        raise RankDeficient(f"QR factor of iterate {s.k} is rank deficient")
    return IterationState(s.k + 1, nxt, matmul(s.v, q))


def step_perm_qr(s, p):
    """Factor ``P a P^T = q r``; ``a -> r @ q``; ``v -> v @ (P^T q)``."""
    nxt, q, ok = qr_step(sym_permute(s.a, p))
    if not ok:
        raise RankDeficient(f"QR factor of permuted iterate {s.k} is rank deficient")
    # P^T q is a row reordering of q
    return IterationState(s.k + 1, nxt, matmul(s.v, q[list(p.inverse().index)]))


def step_qrs(s):
    """Shifted step with ``shift = a[N, N]``: factor ``a - shift*I``, add it back.

    If ``a - shift*I`` is numerically singular (the shift hit an eigenvalue)
    the shift is moved by ``1e-8 * max|a|`` and the step retried once.
    """
    a = s.a
    n = a.shape[0]
    eye = np.eye(n)
    shift = float(a[-1, -1])
    shifted = a - shift * eye
    q, r = householder_qr(shifted)
    if not rank_ok(shifted, r):
        shift += SHIFT_PERTURBATION * max_abs(a)
        shifted = a - shift * eye
        q, r = householder_qr(shifted)
        if not rank_ok(shifted, r):
            raise RankDeficient(f"shifted iterate {s.k} singular even after perturbing the shift")
    nxt = symmetrize(matmul(r, q) + shift * eye)
    return IterationState(s.k + 1, nxt, matmul(s.v, q), shift)


def step_cholesky(s):
    """``b -> r @ r.T`` with ``r`` the upper Cholesky factor of ``b``."""
    r = cholesky_upper(s.a)
    return IterationState(s.k + 1, symmetrize(matmul(r, r.T)), None)


def run_iteration(a0, alg, iters, truth=None, tag=None, keep_states=True):
    """Run ``iters`` steps of ``alg`` from ``a0`` and record ``E_k^2`` at each.

    ``truth`` supplies the exact eigenvalues (Jacobi on ``a0`` if omitted).
    QRH and QRS first reduce ``a0`` to tridiagonal form and start with the
    reduction's orthonormal factor as ``v``.  The Cholesky iteration runs on
    ``a0 @ a0`` and is scored against the squared eigenvalues.

    A failing step ends the trace early; the failure is stored on the trace
    rather than raised.  With ``keep_states=False`` only the latest state is
    kept (errors are always complete).
    """
    if iters < 0:
        raise ValueError("iters must be >= 0")
    if isinstance(alg, str):
        alg = Algorithm.parse(alg)
    a0 = as_symmetric(a0)
    if truth is None:
        truth = jacobi_eigen(a0)
    values = np.asarray(truth.values if isinstance(truth, EigenDecomposition) else truth, dtype=float)

    family = alg.family
    if family in (Family.QRH, Family.QRS):
        t, u = tridiagonalize(a0)
        state = IterationState(0, t, u)
    elif family is Family.CHOLESKY:
        state = IterationState(0, symmetrize(matmul(a0, a0)), None)
        values = values * values
    else:
        state = initial_state(a0)

    if family in (Family.QR, Family.QRH):
        step = step_qr
    elif family is Family.QRS:
        step = step_qrs
    elif family is Family.CHOLESKY:
        step = step_cholesky
    else:
        def step(s):
            return step_perm_qr(s, select(alg.strategy, s.a, truth))

    trace = IterationTrace(alg, [state], [error_ek(diag_vec(state.a), values)], tag)
    for _ in range(iters):
        try:
            state = step(state)
        except PermQRError as exc:
            trace.failure = StepFailure(state.k + 1, type(exc).__name__, str(exc))
            break
        if keep_states:
            trace.states.append(state)
        else:
            trace.states[-1] = state
        trace.errors.append(error_ek(diag_vec(state.a), values))
    return trace


def similarity_residual(a0, state):
    """Max-abs of ``v.T a0 v - a`` relative to ``max|a0|``."""
    v = state.v
    return max_abs(v.T @ np.asarray(a0) @ v - state.a) / max(max_abs(a0), np.finfo(float).tiny)



@dataclass(eq=False)
class BatchResult:
    """Outcome of :func:`run_batch`: one error curve per matrix.

    ``errors[i, k]`` is ``E_k^2`` for matrix ``i``; entries after a failed
    step are NaN and ``failures[i]`` describes the failure.
    """

    algorithm: Algorithm
    errors: np.ndarray
    failures: list
    a: np.ndarray
    v: Optional[np.ndarray]


def _fail_all(errors, failures, mask, step, kind, message):
    for i in np.flatnonzero(mask):
        if failures[i] is None:
            failures[i] = StepFailure(step, kind, message)
            errors[i, step:] = np.nan


def run_batch(a0s, alg, iters, truths):
    """Run ``alg`` on a stack of matrices at once.

    Produces, matrix by matrix, exactly the same error curves as
    :func:`run_iteration` (the kernels do not depend on the batch shape),
    at a fraction of the Python overhead.  ``truths`` is a sequence of
    eigenvalue vectors, one per matrix.  The Cholesky family falls back to
    a per-matrix loop.
    """
    if isinstance(alg, str):
        alg = Algorithm.parse(alg)
    a0s = np.asarray(a0s, dtype=float)
    m, n = a0s.shape[0], a0s.shape[-1]
    values = np.array([np.asarray(getattr(t, "values", t), dtype=float) for t in truths]).reshape(m, n)
    errors = np.full((m, iters + 1), np.nan)
    failures = [None] * m

    if alg.family is Family.CHOLESKY:
        finals = []
        for i in range(m):
            tr = run_iteration(a0s[i], alg, iters, values[i], keep_states=False)
            errors[i, :len(tr.errors)] = tr.errors
            failures[i] = tr.failure
            finals.append(tr.final.a)
        return BatchResult(alg, errors, failures, np.array(finals), None)

    truth_sorted = np.array([dsort(v) for v in values]).reshape(m, n)
    if alg.family in (Family.QRH, Family.QRS):
        reduced = [tridiagonalize(a) for a in a0s]
        a = np.array([t for t, _ in reduced]).reshape(m, n, n)
        v = np.array([u for _, u in reduced]).reshape(m, n, n)
    else:
        a = np.array([as_symmetric(x) for x in a0s]).reshape(m, n, n)
        v = np.array(np.broadcast_to(np.eye(n), (m, n, n)))
    eye = np.eye(n)
    rows = np.arange(m)
    errors[:, 0] = batch_error(np.diagonal(a, axis1=-2, axis2=-1), truth_sorted)

    for k in range(1, iters + 1):
        if alg.family in (Family.QR, Family.QRH):
            a, q, ok = qr_step(a)
            v = matmul(v, q)
        elif alg.family is Family.QRS:
            shift = a[:, -1, -1].copy()
            shifted = a - shift[:, None, None] * eye
            q, r = householder_qr(shifted)
            ok = rank_ok(shifted, r)
            if not ok.all():
                retry = ~ok
                shift = np.where(retry, shift + SHIFT_PERTURBATION * np.max(np.abs(a), axis=(-2, -1)), shift)
                shifted = a - shift[:, None, None] * eye
                q2, r2 = householder_qr(shifted)
                q = np.where(retry[:, None, None], q2, q)
                r = np.where(retry[:, None, None], r2, r)
                ok = rank_ok(shifted, r)
            a = symmetrize(matmul(r, q) + shift[:, None, None] * eye)
            v = matmul(v, q)
        else:
            index, found = select_batch(alg.strategy, a, truth_sorted)
            if not found.all():
                _fail_all(errors, failures, ~found, k, "RankDeficient",
                          "every BIC candidate step was rank deficient")
            permuted = a[rows[:, None, None], index[:, :, None], index[:, None, :]]
            a, q, ok = qr_step(permuted)
            inverse = np.argsort(index, axis=-1)
            v = matmul(v, np.take_along_axis(q, inverse[:, :, None], axis=1))
        if not ok.all():
            _fail_all(errors, failures, ~ok, k, "RankDeficient", f"QR factor of iterate {k - 1} is rank deficient")
        cur = batch_error(np.diagonal(a, axis1=-2, axis2=-1), truth_sorted)
        live = np.array([f is None for f in failures])
        errors[live, k] = cur[live]
    return BatchResult(alg, errors, failures, a, v)
