# One matrix, every algorithm: how fast does the sorted diagonal approach the
# eigenvalues?  E_k^2 is the squared distance between the two sorted vectors.

import numpy as np

from permqr import BIC, CO, DO, QR, QRH, QRS, jacobi_eigen, run_iteration
from permqr.ensemble import gen_positive_definite, matrix_stream

A = gen_positive_definite(4, matrix_stream(seed=1, index=0))
truth = jacobi_eigen(A)
print("eigenvalues:", np.sort(truth.values)[::-1])

checkpoints = [0, 1, 2, 5, 10, 20, 30, 50]
print(f"\n{'k':>6}" + "".join(f"{k:>11}" for k in checkpoints))
for alg in (QR, QRH, QRS, DO, CO, BIC):
    trace = run_iteration(A, alg, 50, truth)
    print(f"{alg.label:>6}" + "".join(f"{trace.errors[k]:11.2e}" for k in checkpoints))

# The accumulated factor V_k diagonalizes A: V^T A V equals the final iterate.
trace = run_iteration(A, CO, 50, truth)
V = trace.final.v
print("\n|V^T A V - A_50| =", np.abs(V.T @ A @ V - trace.final.a).max())

# Equal-magnitude eigenvalues stall the unshifted iteration entirely.
swap = np.array([[0.0, 1.0], [1.0, 0.0]])
print("QR on [[0,1],[1,0]]:", run_iteration(swap, QR, 5).errors)
