"""ODE problem containers and the built-in test problems."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np

JAC_CHECK_RTOL = 1e-5


def fd_jacobian(rhs, t, y):
    """Central-difference Jacobian with offsets ``1e-7 (1 + |y_j|)``."""
    y = np.asarray(y, dtype=float)
    n = y.size
    J = np.empty((n, n))
    for j in range(n):
        d = 1e-7 * (1.0 + abs(y[j]))
        yp = y.copy()
        ym = y.copy()
        yp[j] += d
        ym[j] -= d
        J[:, j] = (np.asarray(rhs(t, yp)) - np.asarray(rhs(t, ym))) / (2 * d)
    return J


@dataclass(frozen=True, eq=False)
class OdeProblem:
    """``y' = rhs(t, y)`` in ``dim`` dimensions.

    If both ``jacobian`` and ``probe = (t, y)`` are given, the analytic
    Jacobian is compared against finite differences once, at construction.
    With ``vectorized=True`` the stage solvers call ``rhs(t, Y)`` once with
    ``t`` of shape ``(m,)`` and ``Y`` of shape ``(m, dim)``.
    """

    dim: int
    rhs: Callable
    jacobian: Optional[Callable] = None
    exact: Optional[Callable] = None
    probe: Optional[tuple] = None
    name: str = ""
    vectorized: bool = False

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.probe is not None:
            t, y = self.probe
            f = np.asarray(self.rhs(t, np.asarray(y, dtype=float)))
            if f.shape != (self.dim,):
                raise ValueError(f"rhs returned shape {f.shape}, expected ({self.dim},)")
            if self.jacobian is not None:
                J = np.asarray(self.jacobian(t, np.asarray(y, dtype=float)), dtype=float)
                Jfd = fd_jacobian(self.rhs, t, y)
                scale = max(1.0, float(np.max(np.abs(J))))
                if J.shape != (self.dim, self.dim) or np.max(np.abs(J - Jfd)) > JAC_CHECK_RTOL * scale:
                    raise ValueError(f"analytic Jacobian of {self.name or 'problem'} disagrees "
                                     "with finite differences")

    def jac(self, t, y):
        if self.jacobian is not None:
            return np.asarray(self.jacobian(t, y), dtype=float)
        return fd_jacobian(self.rhs, t, y)


@dataclass(frozen=True, eq=False)
class HamiltonianProblem:
    """Canonical system ``y' = J grad H(y)`` with ``y = (q, p)``, ``q, p`` in R^m.

    ``vectorized`` declares that ``hamiltonian`` and ``gradient`` accept a
    stack of states along the leading axis.
    """

    m: int
    hamiltonian: Callable
    gradient: Callable
    hessian: Optional[Callable] = None
    y0: Optional[np.ndarray] = None
    name: str = ""
    vectorized: bool = False

    @property
    def dim(self) -> int:
        return 2 * self.m

    def rhs(self, t, y):
        g = np.asarray(self.gradient(y))
        out = np.empty(g.shape)
        out[..., :self.m] = g[..., self.m:]
        np.negative(g[..., :self.m], out=out[..., self.m:])
        return out

    def _jacobian(self, t, y):
        Hs = np.asarray(self.hessian(y), dtype=float)
        return np.vstack([Hs[self.m:], -Hs[:self.m]])

    def jac(self, t, y):
        return self.ode.jac(t, y)

    @cached_property
    def ode(self) -> OdeProblem:
        probe = None if self.y0 is None else (0.0, np.asarray(self.y0, dtype=float))
        return OdeProblem(self.dim, self.rhs,
                          self._jacobian if self.hessian is not None else None,
                          probe=probe, name=self.name, vectorized=self.vectorized)

    def energy(self, y) -> float:
        return float(self.hamiltonian(y))

    def energies(self, Y) -> np.ndarray:
        Y = np.asarray(Y, dtype=float)
        if self.vectorized:
            return np.asarray(self.hamiltonian(Y), dtype=float)
        return np.array([self.hamiltonian(y) for y in Y])


# -- built-in problems -------------------------------------------------------

def harmonic_oscillator() -> HamiltonianProblem:
    """``H = (p^2 + q^2) / 2`` from ``(q, p) = (1, 0)``."""
    return HamiltonianProblem(
        1,
        lambda y: 0.5 * (y[..., 0] ** 2 + y[..., 1] ** 2),
        lambda y: np.array(y, dtype=float),
        lambda y: np.eye(2),
        y0=np.array([1.0, 0.0]),
        name="harmonic",
        vectorized=True,
    )


def _pendulum_gradient(y):
    g = np.array(y, dtype=float)
    np.sin(g[..., 0], out=g[..., 0])
    return g


def pendulum(q0: float = 2.0, p0: float = 0.0) -> HamiltonianProblem:
    """``H = p^2/2 - cos q``; the default start ``q = 2`` is a wide libration."""
    return HamiltonianProblem(
        1,
        lambda y: 0.5 * y[..., 1] ** 2 - np.cos(y[..., 0]),
        _pendulum_gradient,
        lambda y: np.array([[np.cos(y[0]), 0.0], [0.0, 1.0]]),
        y0=np.array([q0, p0]),
        name="pendulum",
        vectorized=True,
    )


def kepler(e: float = 0.6) -> HamiltonianProblem:
    """Two-body problem ``H = |p|^2/2 - 1/|q|`` started at pericentre with eccentricity ``e``."""

    def H(y):
        return 0.5 * (y[..., 2] ** 2 + y[..., 3] ** 2) - 1.0 / np.hypot(y[..., 0], y[..., 1])

    def grad(y):
        r3 = np.hypot(y[..., 0], y[..., 1])[..., None] ** 3
        g = np.array(y, dtype=float)
        g[..., :2] /= r3
        return g

    def hess(y):
        x, z = y[0], y[1]
        r2 = x * x + z * z
        r5 = r2 ** 2.5
        Hs = np.zeros((4, 4))
        Hs[0, 0] = (r2 - 3 * x * x) / r5
        Hs[1, 1] = (r2 - 3 * z * z) / r5
        Hs[0, 1] = Hs[1, 0] = -3 * x * z / r5
        Hs[2, 2] = Hs[3, 3] = 1.0
        return Hs

    y0 = np.array([1.0 - e, 0.0, 0.0, np.sqrt((1.0 + e) / (1.0 - e))])
    return HamiltonianProblem(2, H, grad, hess, y0=y0, name="kepler", vectorized=True)


BUILTIN_PROBLEMS = {
    "harmonic": harmonic_oscillator,
    "pendulum": pendulum,
    "kepler": kepler,
}


def builtin_problem(name: str) -> HamiltonianProblem:
    try:
        return BUILTIN_PROBLEMS[name]()
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose from {sorted(BUILTIN_PROBLEMS)}") from None
