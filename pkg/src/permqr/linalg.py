"""Dense real linear algebra: Householder QR, Cholesky, tridiagonal reduction
and a cyclic Jacobi eigensolver used as the ground-truth oracle.

Matrices are plain ``numpy.ndarray`` objects.  The QR kernel and ``matmul``
accept stacks of matrices with shape ``(..., n, n)`` and are written with
elementwise ufuncs and left-to-right accumulation only, so the result for a
given matrix is bit-identical whether it is factored alone or inside a batch.
The permutation strategies depend on that when they score candidates in bulk.
"""

from typing import NamedTuple

import numpy as np

from .errors import InvalidMatrix, NoConvergence, NotPositiveDefinite, RankDeficient

SYMMETRY_TOL = 1e-12
RANK_TOL = 1e-12


class QrFactors(NamedTuple):
    q: np.ndarray
    r: np.ndarray


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def max_abs(a):
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def as_square(a, name="matrix"):
    """Return ``a`` as a finite float array of shape (n, n)."""
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidMatrix(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidMatrix(f"{name} has non-finite entries")
    return a


def as_symmetric(a, name="matrix", tol=SYMMETRY_TOL):
    """Validate symmetry relative to the largest entry and return a float copy."""
    a = as_square(a, name)
    scale = max_abs(a)
    asym = max_abs(a - a.T)
    if asym > tol * scale:
        raise InvalidMatrix(
            f"{name} is not symmetric: max |a_ij - a_ji| = {asym:.3e} "
            f"exceeds {tol:g} * {scale:.3e}"
        )
    return a


def symmetrize(a):
    """Average with the transpose; the result is exactly symmetric."""
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def _dot(x, y):
    # ordered accumulation over the last axis, see module docstring
    acc = x[..., 0] * y[..., 0]
    for i in range(1, x.shape[-1]):
        acc = acc + x[..., i] * y[..., i]
    return acc


def matmul(a, b):
    """Matrix product over the last two axes, batch-shape independent."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = a[..., :, 0, None] * b[..., None, 0, :]
    for k in range(1, a.shape[-1]):
        out = out + a[..., :, k, None] * b[..., None, k, :]
    return out


def householder_qr(a):
    """Householder QR of a square matrix or stack of matrices.

    Returns ``(q, r)`` with ``r`` upper triangular and a non-negative
    diagonal: whenever a reflection leaves ``r[i, i] < 0`` the sign of row
    ``i`` of ``r`` and column ``i`` of ``q`` are flipped.  No rank check is
    made; see :func:`qr_factor`.
    """
    r = np.array(a, dtype=float)
    n = r.shape[-1]
    q = np.array(np.broadcast_to(np.eye(n), r.shape))
    for j in range(n - 1):
        x = r[..., j:, j]
        x0 = x[..., 0]
        tail = _dot(x[..., 1:], x[..., 1:])
        norm = np.sqrt(x0 * x0 + tail)
        v = x.copy()
        # v = x - alpha*e1 with alpha = -sign(x0)*||x||, no cancellation
        v[..., 0] = x0 + np.where(x0 < 0, -norm, norm)
        vv = _dot(v, v)
        # column already zero below the diagonal: H = I, as LAPACK's dlarfg
        active = tail > 0
        beta = np.where(active, 2.0 / np.where(active, vv, 1.0), 0.0)
        bv = beta[..., None] * v

        block = r[..., j:, j:]
        w = _dot(np.swapaxes(block, -1, -2), v[..., None, :])
        r[..., j:, j:] = block - bv[..., :, None] * w[..., None, :]

        qb = q[..., :, j:]
        u = _dot(qb, v[..., None, :])
        q[..., :, j:] = qb - u[..., :, None] * bv[..., None, :]

    d = np.diagonal(r, axis1=-2, axis2=-1)
    sign = np.where(d < 0, -1.0, 1.0)
    # + 0.0 turns -0.0 into 0.0
    r = np.triu(r * sign[..., :, None]) + 0.0
    q = q * sign[..., None, :] + 0.0
    return q, r


def rank_ok(a, r, tol=RANK_TOL):
    """Boolean (per matrix) telling whether every R pivot exceeds the rank tolerance."""
    a = np.asarray(a)
    scale = np.max(np.abs(a), axis=(-2, -1))
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return np.all(d > tol * scale[..., None], axis=-1)


def qr_factor(a):
    """QR factorization ``a = q @ r`` with ``r[i, i] > 0`` for every ``i``.

    Raises :class:`RankDeficient` when a pivot of ``r`` is at most
    ``1e-12 * max|a|``, i.e. the input is numerically singular.
    """
    a = as_square(a)
    q, r = householder_qr(a)
    if not rank_ok(a, r):
        d = np.diag(r)
        i = int(np.argmin(d))
        raise RankDeficient(
            f"R[{i + 1},{i + 1}] = {d[i]:.3e} is below {RANK_TOL:g} * max|a| "
            f"= {RANK_TOL * max_abs(a):.3e}"
        )
    return QrFactors(q, r)


def cholesky_upper(b):
    """Upper-triangular ``r`` with positive diagonal and ``r.T @ r == b``."""
    b = as_symmetric(b)
    n = b.shape[0]
    r = np.zeros_like(b)
    for j in range(n):
        pivot = b[j, j] - r[:j, j] @ r[:j, j]
        if not pivot > 0:
            raise NotPositiveDefinite(f"pivot {j + 1} is {pivot:.3e}")
        r[j, j] = np.sqrt(pivot)
        r[j, j + 1:] = (b[j, j + 1:] - r[:j, j] @ r[:j, j + 1:]) / r[j, j]
    return r


def tridiagonalize(a):
    """Reduce a symmetric matrix to tridiagonal form by Householder similarities.

    Returns ``(t, u)`` with ``u`` orthonormal and ``u.T @ a @ u == t``.
    Columns that are already zero below the subdiagonal are skipped, so a
    tridiagonal input comes back unchanged with ``u = I``.
    """
    t = as_symmetric(a)
    n = t.shape[0]
    u = np.eye(n)
    for j in range(n - 2):
        x = t[j + 1:, j]
        tail = x[1:] @ x[1:]
        if tail == 0:
            continue
        norm = np.sqrt(x[0] * x[0] + tail)
        v = x.copy()
        v[0] += -norm if x[0] < 0 else norm
        beta = 2.0 / (v @ v)
        t[j + 1:, :] -= beta * np.outer(v, v @ t[j + 1:, :])
        t[:, j + 1:] -= beta * np.outer(t[:, j + 1:] @ v, v)
        u[:, j + 1:] -= beta * np.outer(u[:, j + 1:] @ v, v)
    t = np.triu(np.tril(t, 1), -1)
    return symmetrize(t), u


def off_diagonal_norm(a):
    """Frobenius norm of the off-diagonal part."""
    a = np.asarray(a, dtype=float)
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def jacobi_eigen(a, tol=1e-14, max_sweeps=100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius norm is at most ``tol`` times
    the Frobenius norm of ``a``.  Shares no code with the QR paths, which is
    the reason it serves as ground truth.
    """
    a = as_symmetric(a)
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = a.shape[0]
    v = np.eye(n)
    target = tol * np.linalg.norm(a)
    for _ in range(max_sweeps):
        if off_diagonal_norm(a) <= target:
            return EigenDecomposition(np.diag(a).copy(), v)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    if off_diagonal_norm(a) <= target:
        return EigenDecomposition(np.diag(a).copy(), v)
    raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")


def qr_step(a):
    """One unshifted QR step ``a -> r @ q`` on a matrix or a stack.

    Returns ``(next_a, q, ok)`` where ``ok`` flags (per matrix) that the
    factorization passed the rank check.  ``next_a`` is symmetrized.
    """
    q, r = householder_qr(a)
    return symmetrize(matmul(r, q)), q, rank_ok(a, r)
