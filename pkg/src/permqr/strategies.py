"""Choice of the permutation applied before each QR factorization.

Four strategies are available: the identity, diagonal ordering (DO),
column ordering (CO) and the exhaustive best-instantaneous-convergence
search (BIC), which needs the true eigenvalues and is only a bound.
"""

from enum import Enum
import itertools

import numpy as np

from .errors import MissingTruth, OrderTooLarge, RankDeficient
from .linalg import EigenDecomposition, qr_step
from .metrics import batch_error, dsort
from .permutation import Permutation

BIC_MAX_ORDER = 8


class Strategy(Enum):
    IDENTITY = "IDENTITY"
    DO = "DO"
    CO = "CO"
    BIC = "BIC"


def _order_by_magnitude(d):
    # stable, so ties keep ascending original index like MATLAB's sort
    return Permutation(tuple(np.argsort(-np.abs(np.real(d)), kind="stable")))


def diord(a):
    """Permutation sorting the diagonal of ``a`` by descending absolute value."""
    return _order_by_magnitude(np.diagonal(np.asarray(a, dtype=float)))


def _column_sq_norms(a):
    sq = a * a
    acc = sq[..., 0, :]
    for i in range(1, sq.shape[-2]):
        acc = acc + sq[..., i, :]
    return acc


def column_order(a):
    """Permutation sorting the columns of ``a`` by descending Euclidean norm.

    Equal to ``diord(a @ a)`` for symmetric ``a`` since the diagonal of
    ``a @ a`` holds the squared column norms; this costs O(N^2) instead of
    forming the product.
    """
    return _order_by_magnitude(_column_sq_norms(np.asarray(a, dtype=float)))


def _truth_values(truth):
    if isinstance(truth, EigenDecomposition):
        return np.asarray(truth.values, dtype=float)
    return np.asarray(truth, dtype=float)


def all_permutations(order):
    """Every permutation of ``order`` items as an index array, lexicographic."""
    return np.array(list(itertools.permutations(range(order))), dtype=np.intp).reshape(-1, order)


def candidate_errors(a_k, truth, candidates=None):
    """Post-step squared error for each candidate permutation.

    ``candidates`` is an ``(m, n)`` index array (default: all ``n!``).
    Candidates whose trial factorization is rank deficient score ``inf``.
    The trial step is the same kernel the engine uses, so these scores are
    bit-identical to the errors the engine records after stepping.
    """
    a_k = np.asarray(a_k, dtype=float)
    n = a_k.shape[0]
    if candidates is None:
        candidates = all_permutations(n)
    permuted = a_k[candidates[:, :, None], candidates[:, None, :]]
    nxt, _, ok = qr_step(permuted)
    errs = batch_error(np.diagonal(nxt, axis1=-2, axis2=-1), dsort(_truth_values(truth)))
    return np.where(ok, errs, np.inf)


def bic_select(a_k, truth):
    """Permutation giving the smallest error after one trial step.

    All ``n!`` candidates are scored; ties go to the lexicographically
    smallest index map.  The error is taken after the step, since the
    permutation is what produces the next iterate.
    """
    a_k = np.asarray(a_k, dtype=float)
    n = a_k.shape[0]
    if n > BIC_MAX_ORDER:
        raise OrderTooLarge(f"BIC enumerates {n}! permutations; order must be <= {BIC_MAX_ORDER}")
    candidates = all_permutations(n)
    errs = candidate_errors(a_k, truth, candidates)
    best = int(np.argmin(errs))
    if not np.isfinite(errs[best]):
        raise RankDeficient("every BIC candidate step was rank deficient")
    return Permutation(tuple(candidates[best]))


def select(strategy, a_k, truth=None):
    strategy = Strategy(strategy)
    if strategy is Strategy.IDENTITY:
        return Permutation.identity(np.shape(a_k)[0])
    if strategy is Strategy.DO:
        return diord(a_k)
    if strategy is Strategy.CO:
        return column_order(a_k)
    if truth is None:
        raise MissingTruth("BIC needs the true eigenvalues")
    return bic_select(a_k, truth)


def select_batch(strategy, a, truth_sorted=None, chunk=50_000):
    """Vectorized :func:`select` over a stack ``a`` of shape ``(m, n, n)``.

    Returns ``(index, ok)``: an ``(m, n)`` array of index maps and a boolean
    mask that is False where BIC found no usable candidate.  Row ``i`` of
    ``index`` equals ``select(strategy, a[i], ...).index`` exactly.
    ``truth_sorted`` holds each matrix's eigenvalues in descending order.
    """
    strategy = Strategy(strategy)
    a = np.asarray(a, dtype=float)
    m, n = a.shape[0], a.shape[-1]
    ok = np.ones(m, dtype=bool)
    if strategy is Strategy.IDENTITY:
        return np.tile(np.arange(n), (m, 1)), ok
    if strategy is Strategy.DO:
        d = np.diagonal(a, axis1=-2, axis2=-1)
        return np.argsort(-np.abs(d), axis=-1, kind="stable"), ok
    if strategy is Strategy.CO:
        return np.argsort(-_column_sq_norms(a), axis=-1, kind="stable"), ok
    if truth_sorted is None:
        raise MissingTruth("BIC needs the true eigenvalues")
    if n > BIC_MAX_ORDER:
        raise OrderTooLarge(f"BIC enumerates {n}! permutations; order must be <= {BIC_MAX_ORDER}")
    candidates = all_permutations(n)
    c = len(candidates)
    index = np.empty((m, n), dtype=np.intp)
    step = max(1, chunk // c)
    for lo in range(0, m, step):
        block = a[lo:lo + step]
        permuted = block[:, candidates[:, :, None], candidates[:, None, :]]
        nxt, _, good = qr_step(permuted)
        errs = batch_error(np.diagonal(nxt, axis1=-2, axis2=-1), truth_sorted[lo:lo + step, None, :])
        errs = np.where(good, errs, np.inf)
        best = np.argmin(errs, axis=1)
        index[lo:lo + step] = candidates[best]
        ok[lo:lo + step] = np.isfinite(errs[np.arange(len(block)), best])
    return index, ok
