"""Gauss-Legendre collocation tableaux and interpolatory quadrature weights."""

from __future__ import annotations

import math

import numpy as np

from .linalg import lu_factor, lu_solve
from .tableau import ButcherTableau

MAX_STAGES = 10
_NEWTON_CAP = 100
_NEWTON_TOL = 1e-16


def _legendre(n, x):
    """Return ``(P_n(x), P_n'(x))`` for the Legendre polynomial on [-1, 1]."""
    p_prev, p = 1.0, x
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    if n == 0:
        return 1.0, 0.0
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def _check_stages(s):
    if not isinstance(s, (int, np.integer)) or not 1 <= s <= MAX_STAGES:
        raise ValueError(f"stage count must be an integer in 1..{MAX_STAGES}, got {s!r}")


def legendre_nodes(s: int) -> np.ndarray:
    """Roots of the shifted Legendre polynomial of degree ``s`` on (0, 1), increasing.

    Newton's method from Chebyshev starting points, then mirrored
    averaging so that ``c_i + c_{s+1-i} = 1`` holds to rounding.
    """
    _check_stages(s)
    x = np.empty(s)
    for i in range(s):
        xi = math.cos(math.pi * (2 * i + 1) / (2 * s))
        for _ in range(_NEWTON_CAP):
            p, dp = _legendre(s, xi)
            dx = p / dp
            xi -= dx
            if abs(dx) <= _NEWTON_TOL:
                break
        x[i] = xi
    c = np.sort(0.5 * (1.0 - x))
    c = 0.5 * (c + 1.0 - c[::-1])
    if s % 2:
        c[s // 2] = 0.5
    return c


def interpolatory_weights(nodes) -> np.ndarray:
    """Weights ``w`` with ``sum_i w_i x_i^(k-1) = 1/k`` for ``k = 1..s``.

    These integrate every polynomial of degree below ``s`` exactly over [0, 1].
    """
    x = np.asarray(nodes, dtype=float).ravel()
    s = x.size
    if s == 0:
        raise ValueError("at least one node is required")
    if s > 1 and np.min(np.abs(x[:, None] - x[None, :])[~np.eye(s, dtype=bool)]) <= 1e-10:
        raise ValueError("interpolatory weights need pairwise distinct nodes")
    # moments in a basis centred on the nodes; same solution, better conditioning
    m = 0.5 * (x.min() + x.max())
    k = np.arange(1, s + 1)
    V = (x[None, :] - m) ** (k - 1)[:, None]
    moments = ((1.0 - m) ** k - (-m) ** k) / k
    return lu_solve(lu_factor(V), moments)


def gauss_tableau(s: int) -> ButcherTableau:
    """The ``s``-stage Gauss-Legendre collocation method (order ``2s``)."""
    c = legendre_nodes(s)
    b = interpolatory_weights(c)
    # C(s) written in powers of (c - 1/2), equivalent to sum_j a_ij c_j^(k-1) = c_i^k/k
    k = np.arange(1, s + 1)
    d = c - 0.5
    V = d[None, :] ** (k - 1)[:, None]
    rhs = ((d[:, None] ** k - (-0.5) ** k) / k).T
    A = lu_solve(lu_factor(V), rhs).T
    return ButcherTableau(A, b, c, f"Gauss-Legendre s={s}")
