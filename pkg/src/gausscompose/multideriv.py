"""Discretized fourth-order multiderivative midpoint and trapezoidal schemes.

The first and second Lie derivatives of the vector field are replaced by
centered differences over auxiliary stages at ``t_{n+r} +- alpha h``.  The
auxiliary stages come from a degree-two collocation polynomial through
``y_{n+r}``:

    y_{n+r-alpha} = y_{n+r} - (3/4) alpha h (f_{n+r-alpha} + f_{n+r+alpha} / 3)
    y_{n+r+alpha} = y_{n+r} + (3/4) alpha h (f_{n+r-alpha} / 3 + f_{n+r+alpha})

The midpoint variant (AMDMP4_C2) centres these at ``r = 1/2``.  The
trapezoidal variant (AMDTR4_C2) centres them at ``r = 0`` and ``r = 1``, and
the stages at ``r = 1`` are reused as the ``r = 0`` stages of the next step.
At ``alpha = sqrt(3)/6`` the midpoint variant is the two-stage Gauss method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .newton import NewtonOptions, SolverStats, solve_stage_system
from .records import StepRecord
from .tableau import ButcherTableau

ALPHA_MIN = 1e-3
GAUSS_ALPHA = math.sqrt(3.0) / 6.0


@dataclass(frozen=True)
class AlphaParam:
    """Offset of the auxiliary stages, in units of the step."""

    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= ALPHA_MIN):
            raise ValueError(f"alpha must be >= {ALPHA_MIN}, got {self.alpha!r}")

    def __float__(self):
        return float(self.alpha)


def _alpha(alpha) -> float:
    return float(alpha if isinstance(alpha, AlphaParam) else AlphaParam(float(alpha)))


def centered_d1(f_minus, f_plus, alpha, h):
    """``(f_plus - f_minus) / (2 alpha h)``."""
    if not h > 0:
        raise ValueError("h must be positive")
    a = _alpha(alpha)
    return (np.asarray(f_plus) - np.asarray(f_minus)) / (2.0 * a * h)


def centered_d2(f_minus, f_center, f_plus, alpha, h):
    """``(f_plus - 2 f_center + f_minus) / (alpha h)^2``."""
    if not h > 0:
        raise ValueError("h must be positive")
    a = _alpha(alpha)
    return (np.asarray(f_plus) - 2.0 * np.asarray(f_center) + np.asarray(f_minus)) / (a * h) ** 2


def amdmp4_c2_tableau(alpha) -> ButcherTableau:
    """Three-stage tableau of the midpoint scheme, abscissae ``1/2 - alpha, 1/2, 1/2 + alpha``."""
    a = _alpha(alpha)
    i1, i2 = 1.0 / (16.0 * a), 1.0 / (48.0 * a * a)
    mid = 0.5 - 1.0 / (24.0 * a * a)
    A = [
        [-0.75 * a + i1 + i2, mid, -0.25 * a - i1 + i2],
        [i1 + i2, mid, -i1 + i2],
        [0.25 * a + i1 + i2, mid, 0.75 * a - i1 + i2],
    ]
    w = 1.0 / (24.0 * a * a)
    b = [w, 1.0 - 2.0 * w, w]
    c = [0.5 - a, 0.5, 0.5 + a]
    return ButcherTableau(A, b, c, f"AMDMP4_C2(alpha={a:g})")


# -- stage systems -----------------------------------------------------------
#
# Unknowns are ordered (y_{r-alpha}, y_r, y_{r+alpha}).  Every equation is
# written as P Z - q - h K F(Z) = 0.

def _difference_rows(a):
    """Coefficients of (f_-, f_0, f_+) in h*D1 and h^2*D2, per unit step."""
    d1 = np.array([-1.0, 0.0, 1.0]) / (2.0 * a)
    d2 = np.array([1.0, -2.0, 1.0]) / (a * a)
    return d1, d2


def _auxiliary_rows(a):
    """Collocation rows for the outer stages, relative to the centre stage."""
    return (np.array([-0.75 * a, 0.0, -0.25 * a]),
            np.array([0.25 * a, 0.0, 0.75 * a]))


def _centre_system(a):
    """``y_r = y_base + h/2 f_r - h^2/8 D1 f_r + h^3/48 D2 f_r`` plus the two
    collocation rows; returns ``(P, K)``."""
    d1, d2 = _difference_rows(a)
    k_minus, k_plus = _auxiliary_rows(a)
    k_centre = np.array([0.0, 0.5, 0.0]) - d1 / 8.0 + d2 / 48.0
    P = np.array([[1.0, -1.0, 0.0],
                  [0.0, 1.0, 0.0],
                  [0.0, -1.0, 1.0]])
    return P, np.vstack([k_minus, k_centre, k_plus])


def _stacked(base, dim):
    q = np.zeros((3, dim))
    q[1] = base
    return q


def amdmp4_c2_step(problem, t, y, h, alpha, newton: NewtonOptions | None = None,
                   stats: SolverStats | None = None, guess=None) -> StepRecord:
    """One step of the midpoint scheme.

    The three stages are found from one coupled Newton solve; the update

        y_{n+1} = y_n + h f_{n+1/2} + h^3/24 D2 f_{n+1/2}

    is then explicit.  The record's ``y_half``/``f_half`` are the centre stage.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    a = _alpha(alpha)
    y = np.asarray(y, dtype=float)
    c = np.array([0.5 - a, 0.5, 0.5 + a])
    P, K = _centre_system(a)
    Z0 = np.tile(y, (3, 1)) if guess is None else guess
    Z, F = solve_stage_system(problem, t + c * h, P, K, _stacked(y, y.size), h, Z0,
                              (t, y), newton, stats)
    y_next = y + h * F[1] + h ** 3 / 24.0 * centered_d2(F[0], F[1], F[2], a, h)
    return StepRecord(t, h, y, y_next, Z, F, c, y_half=Z[1], f_half=F[1],
                      method=f"amdmp4:{a:g}")


def _bootstrap(problem, t, y, h, a, newton, stats):
    """Stages ``y_{n +- alpha}`` around a known ``y_n``: the r = 0 collocation rows."""
    k_minus, k_plus = _auxiliary_rows(a)
    K = np.vstack([k_minus[[0, 2]], k_plus[[0, 2]]])
    times = t + np.array([-a, a]) * h
    q = np.tile(y, (2, 1))
    return solve_stage_system(problem, times, np.eye(2), K, q, h, q, (t, y), newton, stats)


def _carried_matches(rec, t, y, h, a):
    return (rec is not None and rec.h == h
            and abs(rec.t_end - t) <= 1e-12 * max(1.0, abs(t))
            and np.array_equal(rec.y, y)
            and rec.stages.shape[0] == 3
            and abs(rec.c[2] - rec.c[1] - a) <= 1e-14)


def amdtr4_c2_step(problem, t, y, h, alpha, newton: NewtonOptions | None = None,
                   stats: SolverStats | None = None, carried: StepRecord | None = None,
                   guess=None) -> StepRecord:
    """One step of the trapezoidal scheme.

    ``carried`` is the previous record of the same trajectory.  Its stages
    around ``y_n`` are reused; without it (or after a change of step or
    state) they are bootstrapped with one extra solve.  Then

        y_{n+1/2} = y_n + h/2 f_n + h^2/8 D1 f_n + h^3/48 D2 f_n         (explicit)
        y_{n+1}   = y_{n+1/2} + h/2 f_{n+1} - h^2/8 D1 f_{n+1} + h^3/48 D2 f_{n+1}

    where the second line is solved together with the stages around
    ``y_{n+1}``.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    a = _alpha(alpha)
    y = np.asarray(y, dtype=float)
    if _carried_matches(carried, t, y, h, a):
        Fm, fn, Fp = carried.stage_derivs
    else:
        _, Fo = _bootstrap(problem, t, y, h, a, newton, stats)
        Fm, Fp = Fo
        fn = np.asarray(problem.rhs(t, y), dtype=float)
    y_half = (y + 0.5 * h * fn + h ** 2 / 8.0 * centered_d1(Fm, Fp, a, h)
              + h ** 3 / 48.0 * centered_d2(Fm, fn, Fp, a, h))

    c = np.array([1.0 - a, 1.0, 1.0 + a])
    P, K = _centre_system(a)
    if guess is None:
        centre = 2.0 * y_half - y
        guess = np.vstack([centre - (y_half - y) * 2 * a, centre, centre + (y_half - y) * 2 * a])
    Z, F = solve_stage_system(problem, t + c * h, P, K, _stacked(y_half, y.size), h, guess,
                              (t, y), newton, stats)
    return StepRecord(t, h, y, Z[1].copy(), Z, F, c, y_half=y_half, method=f"amdtr4:{a:g}")
