"""Fixed-step integration with implicit Runge-Kutta and multiderivative schemes.

Besides plain tableau stepping this provides the composed Gauss-4 step,
which returns the midpoint value of the half-step factor from the same
stage solve, and two continuous extensions over each step:

* :func:`dense_eval`, the cubic built from the stage derivatives, the
  midpoint value and one extra ``f`` evaluation there;
* :func:`collocation_eval`, the usual collocation polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .composition import conjugate_gauss, gauss_pair
from .gauss import gauss_tableau
from .linalg import lu_factor, lu_solve
from .multideriv import GAUSS_ALPHA, AlphaParam, amdmp4_c2_step, amdtr4_c2_step, centered_d1, centered_d2
from .newton import NewtonOptions, SolverStats, eval_stages, solve_stage_system
from .records import StepRecord, attach_f_half
from .tableau import ButcherTableau, classical_rk4

__all__ = [
    "StepRecord", "attach_f_half", "rk_step", "gauss4_composed_step", "dense_eval",
    "collocation_eval", "integrate_fixed", "Trajectory", "TableauMethod", "ComposedGauss4",
    "AMDMP4", "AMDTR4", "method_from_descriptor", "IntegrationError", "iterate_steps",
    "as_method",
]


class IntegrationError(RuntimeError):
    def __init__(self, step_index: int, cause: Exception):
        super().__init__(f"step {step_index} failed: {cause}")
        self.step_index = step_index
        self.cause = cause


def rk_step(tab: ButcherTableau, problem, t, y, h, newton: NewtonOptions | None = None,
            stats: SolverStats | None = None, guess=None) -> StepRecord:
    """One Runge-Kutta step.

    Explicit tableaux are evaluated stage by stage; otherwise the stacked
    stage equations ``Y_i = y + h sum_j a_ij f(t + c_j h, Y_j)`` are solved
    by simplified Newton (one counted solve).
    """
    if h == 0:
        raise ValueError("step size must be nonzero")
    y = np.asarray(y, dtype=float)
    s, A = tab.s, tab.A
    times = t + tab.c * h
    if tab.is_explicit:
        Y = np.empty((s, y.size))
        F = np.empty((s, y.size))
        for i in range(s):
            Y[i] = y + h * (A[i, :i] @ F[:i])
            F[i] = problem.rhs(times[i], Y[i])
        if not np.isfinite(F).all():
            eval_stages(problem, times, Y)  # raises with the standard error
    else:
        q = np.broadcast_to(y, (s, y.size))
        Y, F = solve_stage_system(problem, times, _eye(s), A, q, h,
                                  q if guess is None else guess, (t, y), newton, stats)
    y_next = y + h * (tab.b @ F)
    return StepRecord(t, h, y, y_next, Y, F, tab.c, method=tab.name)


@lru_cache(maxsize=None)
def _eye(s):
    e = np.eye(s)
    e.flags.writeable = False
    return e


@lru_cache(maxsize=None)
def _gauss4():
    return gauss_tableau(2), gauss_pair(2).phi.b


def gauss4_composed_step(problem, t, y, h, newton: NewtonOptions | None = None,
                         stats: SolverStats | None = None, guess=None) -> StepRecord:
    """Gauss-4 step that also reports the half-step value of the first factor.

    One stage solve yields both ``y_{n+1}`` and ``y_half = y_n + (h/2) b_phi . F``.
    """
    tab, b_phi = _gauss4()
    rec = rk_step(tab, problem, t, y, h, newton, stats, guess)
    y_half = rec.y_start + 0.5 * h * (b_phi @ rec.stage_derivs)
    return replace(rec, y_half=y_half, method="gauss4")


def _outer_alpha(record):
    c = record.c
    return 0.5 * (c[-1] - c[0])


def dense_eval(record: StepRecord, tau, alpha=None):
    """Cubic continuous extension about the step midpoint, ``tau`` in [-1/2, 1/2].

    ``y(t_n + (1/2 + tau) h) ~ y_half + tau h f_half + (tau h)^2/2 D1 + (tau h)^3/6 D2``,
    with the centered differences taken over the outermost stages.  Accepts
    scalar or array ``tau``; returns shape ``(dim,)`` or ``(len(tau), dim)``.
    """
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(np.abs(tau_arr) > 0.5):
        raise ValueError("tau must lie in [-1/2, 1/2]")
    if record.y_half is None or record.f_half is None:
        raise ValueError("dense output needs y_half and f_half (see attach_f_half)")
    a = _outer_alpha(record)
    if abs(record.c[0] + record.c[-1] - 1.0) > 1e-12:
        raise ValueError("outer stages are not placed symmetrically about the midpoint")
    if alpha is not None and abs(float(alpha) - a) > 1e-12:
        raise ValueError(f"record stages correspond to alpha={a!r}, not {alpha!r}")
    h = record.h
    Fm, Fp = record.stage_derivs[0], record.stage_derivs[-1]
    d1 = centered_d1(Fm, Fp, a, h)
    d2 = centered_d2(Fm, record.f_half, Fp, a, h)
    th = (tau_arr * h)[..., None]
    out = record.y_half + th * record.f_half + th ** 2 / 2.0 * d1 + th ** 3 / 6.0 * d2
    return out


def _lagrange_integrals(c, theta):
    """``W[k, i] = int_0^{theta_k} l_i`` for the Lagrange basis on nodes ``c``."""
    return _lagrange_integrals_cached(c.tobytes(), theta.tobytes()).copy()


@lru_cache(maxsize=256)
def _lagrange_integrals_cached(c_bytes, theta_bytes):
    c = np.frombuffer(c_bytes)
    theta = np.frombuffer(theta_bytes)
    s = c.size
    V = c[None, :] ** np.arange(s)[:, None]          # V[k, j] = c_j^k
    coef = lu_solve(lu_factor(V.T), np.eye(s)).T     # l_i(x) = sum_k coef[i, k] x^k
    k = np.arange(1, s + 1)
    powers = theta[:, None] ** k[None, :] / k        # int_0^theta x^(k-1)
    return powers @ coef.T


def _collocation_poly(record, theta):
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    W = _lagrange_integrals(np.asarray(record.c, dtype=float), theta)
    return record.y_start + record.h * (W @ record.stage_derivs)


def collocation_eval(record: StepRecord, theta):
    """Collocation polynomial ``u(t_n + theta h)``, ``theta`` in [0, 1]."""
    theta_arr = np.asarray(theta, dtype=float)
    if np.any((theta_arr < 0.0) | (theta_arr > 1.0)):
        raise ValueError("theta must lie in [0, 1]")
    out = _collocation_poly(record, theta_arr)
    return out[0] if theta_arr.ndim == 0 else out


# -- methods -----------------------------------------------------------------

def _distinct(c):
    return c.size == 1 or np.min(np.diff(np.sort(c))) > 1e-10


@dataclass(frozen=True)
class TableauMethod:
    tableau: ButcherTableau
    name: str = ""
    _extrapolate: bool = field(init=False, repr=False, compare=False, default=False)

    def __post_init__(self):
        tab = self.tableau
        object.__setattr__(self, "_extrapolate", not tab.is_explicit and _distinct(tab.c))

    def step(self, problem, t, y, h, newton=None, stats=None, previous=None):
        guess = None
        tab = self.tableau
        if self._extrapolate and previous is not None \
                and previous.h == h and previous.c.shape == tab.c.shape:
            guess = _collocation_poly(previous, 1.0 + tab.c)
        return rk_step(tab, problem, t, y, h, newton, stats, guess)


@dataclass(frozen=True)
class ComposedGauss4:
    name: str = "gauss4"

    def step(self, problem, t, y, h, newton=None, stats=None, previous=None):
        guess = None
        if previous is not None and previous.h == h:
            guess = _collocation_poly(previous, 1.0 + previous.c)
        return gauss4_composed_step(problem, t, y, h, newton, stats, guess)


@dataclass(frozen=True)
class AMDMP4:
    alpha: float = GAUSS_ALPHA
    name: str = "amdmp4"

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(AlphaParam(float(self.alpha))))

    def step(self, problem, t, y, h, newton=None, stats=None, previous=None):
        guess = None
        if previous is not None and previous.h == h:
            guess = y + (previous.stages - previous.y_start)
        return amdmp4_c2_step(problem, t, y, h, self.alpha, newton, stats, guess)


@dataclass(frozen=True)
class AMDTR4:
    alpha: float = GAUSS_ALPHA
    name: str = "amdtr4"

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(AlphaParam(float(self.alpha))))

    def step(self, problem, t, y, h, newton=None, stats=None, previous=None):
        return amdtr4_c2_step(problem, t, y, h, self.alpha, newton, stats, carried=previous)


def method_from_descriptor(desc: str):
    """Parse a method name.

    ``gauss4`` (composed Gauss-4), ``gauss:S``, ``conjugate4``, ``conjugate:S``,
    ``phi``, ``psi`` (half-step factors of ``gauss:2``, also ``phi:S``/``psi:S``),
    ``amdmp4:ALPHA``, ``amdtr4:ALPHA`` (``ALPHA`` may be ``gauss``), ``rk4``.
    """
    name, _, arg = desc.strip().lower().partition(":")
    try:
        if name == "gauss4" and not arg:
            return ComposedGauss4()
        if name == "gauss":
            s = int(arg or 2)
            return TableauMethod(gauss_tableau(s), f"gauss:{s}")
        if name in ("conjugate4", "conjugate"):
            s = 2 if name == "conjugate4" else int(arg or 2)
            return TableauMethod(conjugate_gauss(s), f"conjugate:{s}")
        if name in ("phi", "psi"):
            s = int(arg or 2)
            pair = gauss_pair(s)
            return TableauMethod(pair.phi if name == "phi" else pair.psi, f"{name}:{s}")
        if name in ("amdmp4", "amdtr4"):
            alpha = GAUSS_ALPHA if arg in ("", "gauss") else float(arg)
            cls = AMDMP4 if name == "amdmp4" else AMDTR4
            return cls(alpha, f"{name}:{alpha:g}")
        if name == "rk4" and not arg:
            return TableauMethod(classical_rk4(), "rk4")
    except ValueError as exc:
        raise ValueError(f"bad method descriptor {desc!r}: {exc}") from None
    raise ValueError(f"unknown method descriptor {desc!r}")


# -- trajectories ------------------------------------------------------------

@dataclass
class Trajectory:
    method: str
    t0: float
    y0: np.ndarray
    h: float
    records: list
    stats: SolverStats = field(default_factory=SolverStats)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(len(self.records) + 1)

    @property
    def states(self) -> np.ndarray:
        return np.vstack([self.y0] + [r.y for r in self.records])

    def with_f_half(self, problem) -> "Trajectory":
        return replace(self, records=[attach_f_half(r, problem) for r in self.records])


def iterate_steps(method, problem, t0, y0, h, n_steps, newton: NewtonOptions | None = None,
                  stats: SolverStats | None = None):
    """Yield the records of ``n_steps`` fixed steps without storing them.

    Step failures are re-raised as :class:`IntegrationError` carrying the
    index of the failing step.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    method = as_method(method)
    y = np.array(y0, dtype=float)
    previous = None
    for k in range(n_steps):
        t = t0 + k * h
        try:
            previous = method.step(problem, t, y, h, newton, stats, previous)
        except (ArithmeticError, RuntimeError, ValueError) as exc:
            raise IntegrationError(k, exc) from exc
        yield previous
        y = previous.y


def as_method(method):
    if isinstance(method, str):
        return method_from_descriptor(method)
    if isinstance(method, ButcherTableau):
        return TableauMethod(method, method.name)
    return method


def integrate_fixed(method, problem, t0, y0, h, n_steps, newton: NewtonOptions | None = None,
                    stats: SolverStats | None = None) -> Trajectory:
    """Apply ``method`` for ``n_steps`` steps of size ``h`` from ``(t0, y0)``.

    ``method`` is a method object, a tableau, or a descriptor string
    (see :func:`method_from_descriptor`).
    """
    method = as_method(method)
    stats = stats if stats is not None else SolverStats()
    records = list(iterate_steps(method, problem, t0, y0, h, n_steps, newton, stats))
    return Trajectory(method.name, t0, np.array(y0, dtype=float), h, records, stats)
