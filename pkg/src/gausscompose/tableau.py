"""Butcher tableaux as immutable values, plus the algebra built on them.

Everything here is a pure function of its arguments.  Tableau comparison is
always entrywise with an explicit tolerance (see :meth:`ButcherTableau.deviation`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .linalg import lu_factor, lu_solve

S_REDUCE_TOL = 1e-12


def _frozen(x, ndim):
    arr = np.array(x, dtype=float)
    if arr.ndim == 0 and ndim == 1:
        arr = arr.reshape(1)
    elif arr.ndim == 0 and ndim == 2:
        arr = arr.reshape(1, 1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ButcherTableau:
    """Coefficients ``(A, b, c)`` of an ``s``-stage Runge-Kutta method.

    Abscissae are in units of the step.  Arrays are stored read-only; scalars
    are promoted so ``ButcherTableau(0.5, 1.0, 0.5)`` is the midpoint rule.
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        A, b, c = _frozen(self.A, 2), _frozen(self.b, 1), _frozen(self.c, 1)
        s = b.shape[0]
        if b.ndim != 1 or c.shape != (s,) or A.shape != (s, s):
            raise ValueError(f"inconsistent shapes A{A.shape} b{b.shape} c{c.shape}")
        if not (np.isfinite(A).all() and np.isfinite(b).all() and np.isfinite(c).all()):
            raise ValueError("tableau entries must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def s(self) -> int:
        return self.b.shape[0]

    @cached_property
    def is_explicit(self) -> bool:
        return not np.any(np.triu(self.A))

    def weight_defect(self) -> float:
        """``|sum(b) - 1|``."""
        return abs(float(np.sum(self.b)) - 1.0)

    def row_sum_defect(self) -> float:
        """``max |A 1 - c|`` (stage consistency)."""
        return float(np.max(np.abs(self.A.sum(axis=1) - self.c)))

    def deviation(self, other: "ButcherTableau") -> float:
        """Max entrywise difference over A, b and c; ``inf`` if stage counts differ."""
        if other.s != self.s:
            return float("inf")
        return float(max(np.max(np.abs(self.A - other.A)),
                         np.max(np.abs(self.b - other.b)),
                         np.max(np.abs(self.c - other.c))))

    def renamed(self, name: str) -> "ButcherTableau":
        return ButcherTableau(self.A, self.b, self.c, name)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<ButcherTableau{label} s={self.s}>"


# -- a few classical methods -------------------------------------------------

def explicit_euler() -> ButcherTableau:
    return ButcherTableau(0.0, 1.0, 0.0, "explicit Euler")


def implicit_euler() -> ButcherTableau:
    return ButcherTableau(1.0, 1.0, 1.0, "implicit Euler")


def implicit_midpoint() -> ButcherTableau:
    return ButcherTableau(0.5, 1.0, 0.5, "implicit midpoint")


def trapezoidal() -> ButcherTableau:
    return ButcherTableau([[0.0, 0.0], [0.5, 0.5]], [0.5, 0.5], [0.0, 1.0], "trapezoidal")


def classical_rk4() -> ButcherTableau:
    A = np.zeros((4, 4))
    A[1, 0] = A[2, 1] = 0.5
    A[3, 2] = 1.0
    return ButcherTableau(A, [1 / 6, 1 / 3, 1 / 3, 1 / 6], [0.0, 0.5, 0.5, 1.0], "classical RK4")


# -- order analysis ----------------------------------------------------------

@dataclass(frozen=True)
class SimplifyingResiduals:
    """Residuals of the simplifying assumptions; index ``k - 1`` holds order ``k``."""

    B: tuple
    C: tuple
    D: tuple

    def satisfies(self, p_B: int, p_C: int = 0, p_D: int = 0, tol: float = 1e-13) -> bool:
        return (all(r <= tol for r in self.B[:p_B])
                and all(r <= tol for r in self.C[:p_C])
                and all(r <= tol for r in self.D[:p_D]))


def simplifying_residuals(tab: ButcherTableau, p: int) -> SimplifyingResiduals:
    """Residuals of B(k), C(k), D(k) for ``k = 1..p``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    A, b, c = tab.A, tab.b, tab.c
    B, C, D = [], [], []
    for k in range(1, p + 1):
        ck1 = c ** (k - 1)
        B.append(abs(float(b @ ck1) - 1.0 / k))
        C.append(float(np.max(np.abs(A @ ck1 - c ** k / k))))
        D.append(float(np.max(np.abs((b * ck1) @ A - b * (1.0 - c ** k) / k))))
    return SimplifyingResiduals(tuple(B), tuple(C), tuple(D))


ORDER_CONDITION_LABELS = (
    "sum b = 1",
    "b.c = 1/2",
    "b.c^2 = 1/3",
    "b.Ac = 1/6",
    "b.c^3 = 1/4",
    "b.(c*Ac) = 1/8",
    "b.Ac^2 = 1/12",
    "b.AAc = 1/24",
)


def order_conditions_p4(tab: ButcherTableau) -> np.ndarray:
    """Signed residuals of the eight rooted-tree conditions up to order four.

    Uses ``c`` as stored (not ``A 1``), so tableaux violating stage
    consistency are judged on their own abscissae.
    """
    A, b, c = tab.A, tab.b, tab.c
    Ac = A @ c
    return np.array([
        b.sum() - 1.0,
        b @ c - 1 / 2,
        b @ c ** 2 - 1 / 3,
        b @ Ac - 1 / 6,
        b @ c ** 3 - 1 / 4,
        b @ (c * Ac) - 1 / 8,
        b @ (A @ c ** 2) - 1 / 12,
        b @ (A @ Ac) - 1 / 24,
    ])


def classical_order(tab: ButcherTableau, tol: float = 1e-12) -> int:
    """Largest ``p <= 4`` for which all tree conditions through order ``p`` hold."""
    r = np.abs(order_conditions_p4(tab))
    for p, last in ((4, 8), (3, 4), (2, 2), (1, 1)):
        if np.all(r[:last] <= tol):
            return p
    return 0


@dataclass(frozen=True, eq=False)
class SymplecticityResidual:
    M: np.ndarray
    norm: float


def symplecticity_residual(tab: ButcherTableau) -> SymplecticityResidual:
    """``m_ij = b_i a_ij + b_j a_ji - b_i b_j``; zero iff the method is symplectic."""
    BA = tab.b[:, None] * tab.A
    M = BA + BA.T - np.outer(tab.b, tab.b)
    return SymplecticityResidual(M, float(np.max(np.abs(M))))


# -- transformations ---------------------------------------------------------

def adjoint(tab: ButcherTableau) -> ButcherTableau:
    """Adjoint method, stages listed in reversed order.

    ``a*_ij = b_{s+1-j} - a_{s+1-i,s+1-j}``, ``b*_i = b_{s+1-i}``,
    ``c*_i = 1 - c_{s+1-i}``.
    """
    if abs(float(np.sum(tab.b)) - 1.0) > 1e-12:
        raise ValueError(f"adjoint requires sum(b) = 1, got {np.sum(tab.b)!r}")
    Ar = tab.A[::-1, ::-1]
    br = tab.b[::-1]
    name = f"adjoint of {tab.name}" if tab.name else ""
    return ButcherTableau(br[None, :] - Ar, br, 1.0 - tab.c[::-1], name)


def is_symmetric(tab: ButcherTableau, tol: float = 1e-13) -> bool:
    return adjoint(tab).deviation(tab) <= tol


def compose(first: ButcherTableau, second: ButcherTableau,
            theta1: float = 0.5, theta2: float = 0.5) -> ButcherTableau:
    """One step of ``first`` over ``theta1*h`` followed by ``second`` over ``theta2*h``."""
    if abs(theta1 + theta2 - 1.0) > 1e-14:
        raise ValueError(f"step fractions must sum to 1, got {theta1} + {theta2}")
    s1, s2 = first.s, second.s
    A = np.zeros((s1 + s2, s1 + s2))
    A[:s1, :s1] = theta1 * first.A
    A[s1:, :s1] = theta1 * first.b[None, :]
    A[s1:, s1:] = theta2 * second.A
    b = np.concatenate([theta1 * first.b, theta2 * second.b])
    c = np.concatenate([theta1 * first.c, theta1 + theta2 * second.c])
    return ButcherTableau(A, b, c)


def _refine(labels, keys, tol):
    """Split each class of ``labels`` by closeness of ``keys`` (max-norm).

    New class ids are assigned in order of first appearance.
    """
    reps = []  # (old label, representative key)
    out = []
    for lab, key in zip(labels, keys):
        for g, (rep_lab, rep_key) in enumerate(reps):
            if rep_lab == lab and np.max(np.abs(key - rep_key)) <= tol:
                out.append(g)
                break
        else:
            out.append(len(reps))
            reps.append((lab, key))
    return out


def s_reduce(tab: ButcherTableau, tol: float = S_REDUCE_TOL) -> ButcherTableau:
    """Merge stages that are provably identical for every ODE.

    Partition refinement: start from classes of equal abscissae and split
    until, for every class ``K``, the partial row sums ``sum_{k in K} a_ik``
    agree within each class.  Classes keep the order of their first stage;
    the input is returned unchanged when nothing merges.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = tab.s
    labels = _refine([0] * s, tab.c[:, None], tol)
    while True:
        n_cls = max(labels) + 1
        S = np.zeros((s, n_cls))
        for k, lab in enumerate(labels):
            S[:, lab] += tab.A[:, k]
        refined = _refine(labels, S, tol)
        if max(refined) + 1 == n_cls:
            break
        labels = refined
    if n_cls == s:
        return tab
    reps = [labels.index(K) for K in range(n_cls)]
    A = np.zeros((n_cls, n_cls))
    b = np.zeros(n_cls)
    for k, lab in enumerate(labels):
        A[:, lab] += tab.A[reps, k]
        b[lab] += tab.b[k]
    return ButcherTableau(A, b, tab.c[reps], tab.name)


def stability_function(tab: ButcherTableau, z: complex) -> complex:
    """``R(z) = 1 + z b^T (I - z A)^{-1} 1``.

    Raises :class:`~gausscompose.linalg.SingularSystemError` when
    ``I - zA`` is numerically singular.
    """
    M = np.eye(tab.s, dtype=complex) - complex(z) * tab.A
    x = lu_solve(lu_factor(M), np.ones(tab.s, dtype=complex))
    return complex(1.0 + z * (tab.b @ x))
