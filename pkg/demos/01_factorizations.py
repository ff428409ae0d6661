# Factorization conventions used throughout permqr.
#
# QR always returns R with a positive diagonal.  For a symmetric invertible A
# that makes R the upper Cholesky factor of A @ A, which is what ties the QR
# iteration to the Cholesky iteration.

import numpy as np

from permqr import cholesky_upper, jacobi_eigen, qr_factor, tridiagonalize

rng = np.random.default_rng(0)
m = rng.standard_normal((4, 4))
A = (m + m.T) / 2
print("A =\n", A)

Q, R = qr_factor(A)
print("\ndiag(R) =", np.diag(R))
print("|QR - A|        =", np.abs(Q @ R - A).max())
print("|Q^T Q - I|     =", np.abs(Q.T @ Q - np.eye(4)).max())
print("|R - chol(A^2)| =", np.abs(R - cholesky_upper(A @ A)).max())

# A swap matrix is orthogonal, so its QR is forced: Q = A, R = I.
print("\nqr_factor([[0,1],[1,0]]) ->", qr_factor([[0.0, 1.0], [1.0, 0.0]]))

# Householder reduction to tridiagonal form keeps the eigenvalues.
T, U = tridiagonalize(A)
print("\nT =\n", np.round(T, 12))
print("eig(A) =", np.sort(jacobi_eigen(A).values))
print("eig(T) =", np.sort(jacobi_eigen(T).values))
