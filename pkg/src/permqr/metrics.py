"""Vector helpers and the eigenvalue-estimation error."""

import numpy as np

from .errors import LengthMismatch


def dsort(v):
    """Sort descending; equal values keep their input order."""
    v = np.asarray(v, dtype=float)
    return v[np.argsort(-v, kind="stable")]


def diag_vec(a):
    return np.diagonal(np.asarray(a, dtype=float), axis1=-2, axis2=-1).copy()


def diagmat(v):
    v = np.asarray(v, dtype=float)
    return np.diag(v) if v.size else np.zeros((0, 0))


def error_ek(lambda_k, lambda_true):
    """Squared error ``||dsort(lambda_k) - dsort(lambda_true)||^2``.

    The squared value is what gets averaged and plotted, so it is returned
    directly instead of the norm.
    """
    lambda_k = np.asarray(lambda_k, dtype=float)
    lambda_true = np.asarray(lambda_true, dtype=float)
    if lambda_k.shape != lambda_true.shape:
        raise LengthMismatch(f"lengths {lambda_k.shape} and {lambda_true.shape} differ")
    if lambda_k.size == 0:
        return 0.0
    return float(_sum_sq(dsort(lambda_k) - dsort(lambda_true)))


def batch_error(diagonals, truth_sorted):
    """``error_ek`` for each row of ``diagonals`` against pre-sorted truth.

    Rows are sorted with a plain descending sort, which gives the same
    values as :func:`dsort` (ties only change positions of equal numbers).
    """
    s = -np.sort(-np.asarray(diagonals, dtype=float), axis=-1)
    return _sum_sq(s - truth_sorted)


def _sum_sq(d):
    # fixed left-to-right order so batched and single evaluations agree bitwise
    acc = d[..., 0] * d[..., 0]
    for i in range(1, d.shape[-1]):
        acc = acc + d[..., i] * d[..., i]
    return acc
