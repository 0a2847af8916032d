"""Small dense LU factorization with partial pivoting.

Used for the tiny systems that appear in tableau algebra (stability
functions, Vandermonde moment systems).  Works for real and complex input.
"""

from __future__ import annotations

import numpy as np

PIVOT_FLOOR = 1e-300


class SingularSystemError(ArithmeticError):
    """Raised when a pivot falls below :data:`PIVOT_FLOOR` in magnitude."""


def lu_factor(M):
    """Factor ``M = P L U`` in place on a copy.

    Returns
    -------
    (LU, perm) : tuple
        ``LU`` holds the unit-lower factor below the diagonal and ``U`` on and
        above it; ``perm[k]`` is the original row now at position ``k``.
    """
    LU = np.array(M, dtype=np.result_type(M, float), copy=True)
    n, m = LU.shape
    if n != m:
        raise ValueError(f"square matrix required, got shape {LU.shape}")
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(LU[k:, k])))
        if abs(LU[p, k]) < PIVOT_FLOOR:
            raise SingularSystemError(f"pivot {abs(LU[p, k]):.3e} in column {k}")
        if p != k:
            LU[[k, p]] = LU[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        LU[k + 1:, k] /= LU[k, k]
        LU[k + 1:, k + 1:] -= np.outer(LU[k + 1:, k], LU[k, k + 1:])
    return LU, perm


def lu_solve(factors, rhs):
    """Solve with factors from :func:`lu_factor`; ``rhs`` may be 1-D or 2-D."""
    LU, perm = factors
    n = LU.shape[0]
    x = np.array(rhs, dtype=np.result_type(LU, rhs), copy=True)[perm]
    for i in range(1, n):
        x[i] -= LU[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - LU[i, i + 1:] @ x[i + 1:]) / LU[i, i]
    return x


def solve(M, rhs):
    return lu_solve(lu_factor(M), rhs)
