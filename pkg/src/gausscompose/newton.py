"""Newton iteration for stacked implicit stage systems.

All implicit steps in this package reduce to

    P Z - q - h K F(Z) = 0,       F(Z)_i = f(t_i, Z_i),

with ``Z`` the ``m x dim`` array of unknown stage values.  A Runge-Kutta
step is the case ``P = I``, ``K = A``, ``q_i = y``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve


@dataclass(frozen=True)
class NewtonOptions:
    tol: float = 1e-12          # max-norm of the stage increment
    max_iter: int = 50
    stall_ratio: float = 0.5    # contraction worse than this counts as stalling
    stall_iters: int = 5        # consecutive stalls before switching to full Newton

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("Newton tolerance must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


DEFAULT_NEWTON = NewtonOptions()


@dataclass
class SolverStats:
    """Counters shared across the steps of one trajectory."""

    solves: int = 0
    iterations: int = 0
    jacobians: int = 0
    full_newton_switches: int = 0


class NewtonConvergenceError(RuntimeError):
    def __init__(self, iterations: int, increment: float, tol: float):
        super().__init__(f"stage iteration did not converge after {iterations} iterations "
                         f"(last increment {increment:.3e}, tol {tol:.1e})")
        self.iterations = iterations
        self.increment = increment


class NonFiniteError(FloatingPointError):
    """The right-hand side returned NaN or Inf."""


def eval_stages(problem, times, Z):
    if getattr(problem, "vectorized", False):
        F = np.asarray(problem.rhs(times, Z), dtype=float)
    else:
        F = np.empty_like(Z)
        for i in range(Z.shape[0]):
            F[i] = problem.rhs(times[i], Z[i])
    if not np.isfinite(F).all():
        raise NonFiniteError("right-hand side produced non-finite values")
    return F


def _block_matrix(P, eye, hK, J):
    """``kron(P, I) - kron(hK, J)``; with ``J`` of shape ``(m, d, d)`` the
    Jacobian of stage ``j`` multiplies block column ``j``."""
    m, d = P.shape[0], eye.shape[0]
    Jb = J[None, :, :, :] if J.ndim == 3 else J[None, None, :, :]
    M = P[:, :, None, None] * eye - hK[:, :, None, None] * Jb
    return M.transpose(0, 2, 1, 3).reshape(m * d, m * d)


def solve_stage_system(problem, times, P, K, q, h, guess, jac_point,
                       options: NewtonOptions | None = None,
                       stats: SolverStats | None = None):
    """Solve the stacked system by simplified Newton.

    The Jacobian of ``f`` is frozen at ``jac_point = (t, y)``.  If the
    increments stop contracting for ``options.stall_iters`` iterations the
    solver switches to full Newton with per-stage Jacobians.

    Returns ``(Z, F)`` with ``F`` evaluated at the final iterate.
    """
    opts = options or DEFAULT_NEWTON
    P = np.asarray(P, dtype=float)
    K = np.asarray(K, dtype=float)
    m, dim = q.shape
    eye = np.eye(dim)
    J0 = problem.jac(*jac_point)
    lu = lu_factor(_block_matrix(P, eye, h * K, J0), check_finite=False)
    n_jac = 1

    Z = np.array(guess, dtype=float, copy=True)
    F = eval_stages(problem, times, Z)
    full = False
    stalls = 0
    prev = np.inf
    norm = np.inf
    for it in range(1, opts.max_iter + 1):
        r = q + h * (K @ F) - P @ Z
        if full:
            Js = np.stack([problem.jac(times[j], Z[j]) for j in range(m)])
            n_jac += m
            lu = lu_factor(_block_matrix(P, eye, h * K, Js), check_finite=False)
        dZ = lu_solve(lu, r.ravel(), check_finite=False).reshape(m, dim)
        Z += dZ
        F = eval_stages(problem, times, Z)
        norm = float(np.max(np.abs(dZ)))
        if norm <= opts.tol:
            if stats is not None:
                stats.solves += 1
                stats.iterations += it
                stats.jacobians += n_jac
                stats.full_newton_switches += int(full)
            return Z, F
        if not np.isfinite(norm):
            break
        stalls = stalls + 1 if norm > opts.stall_ratio * prev else 0
        if not full and stalls >= opts.stall_iters:
            full = True
        prev = norm
    raise NewtonConvergenceError(opts.max_iter, norm, opts.tol)
