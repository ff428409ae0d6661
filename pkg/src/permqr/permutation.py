"""Permutations of order N and the symmetric permutation ``P A P^T``."""

from dataclasses import dataclass

import numpy as np

from .errors import OrderMismatch


@dataclass(frozen=True)
class Permutation:
    """Permutation stored as an index map.

    ``index[i] = j`` means row ``i`` of the output takes row ``j`` of the
    input, i.e. ``P[i, index[i]] = 1``.  Indices are 0-based here; use
    :meth:`from_one_based` / :attr:`one_based` for the 1-based convention of
    MATLAB-style listings.
    """

    index: tuple

    def __post_init__(self):
        index = tuple(int(i) for i in self.index)
        if sorted(index) != list(range(len(index))):
            raise ValueError(f"not a permutation of 0..{len(index) - 1}: {self.index}")
        object.__setattr__(self, "index", index)

    @classmethod
    def identity(cls, order):
        return cls(tuple(range(order)))

    @classmethod
    def from_one_based(cls, seq):
        return cls(tuple(int(i) - 1 for i in seq))

    @property
    def order(self):
        return len(self.index)

    @property
    def one_based(self):
        return tuple(i + 1 for i in self.index)

    def is_identity(self):
        return self.index == tuple(range(self.order))

    def inverse(self):
        inv = [0] * self.order
        for i, j in enumerate(self.index):
            inv[j] = i
        return Permutation(tuple(inv))

    def compose(self, other):
        """Permutation whose matrix is ``self.matrix() @ other.matrix()``."""
        if other.order != self.order:
            raise OrderMismatch(f"orders {self.order} and {other.order} differ")
        return Permutation(tuple(other.index[i] for i in self.index))

    __matmul__ = compose

    def apply(self, v):
        """Reorder a vector (or matrix rows): same as ``P @ v``."""
        return np.asarray(v)[list(self.index)]

    def matrix(self):
        return permutation_matrix(self)


def permutation_matrix(p):
    """The 0/1 matrix ``P`` with ``P[i, p.index[i]] = 1``."""
    m = np.zeros((p.order, p.order))
    m[np.arange(p.order), list(p.index)] = 1.0
    return m


def sym_permute(a, p):
    """Return ``P a P^T``, i.e. ``out[i, j] = a[p.index[i], p.index[j]]``.

    Works on a single matrix or a stack ``(..., n, n)``.
    """
    a = np.asarray(a, dtype=float)
    if a.shape[-1] != p.order:
        raise OrderMismatch(f"matrix order {a.shape[-1]} != permutation order {p.order}")
    idx = np.asarray(p.index)
    return a[..., idx[:, None], idx[None, :]]
