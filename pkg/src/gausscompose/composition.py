"""Factorization of an s-stage method into two half-step s-stage methods.

For a base method ``theta = (A, b, c)`` with distinct nodes,

* ``phi`` has matrix ``2A``, nodes ``2c`` and interpolatory weights on ``2c``;
* ``psi`` has matrix ``2A - 1 b_phi^T``, nodes ``2c - 1`` and interpolatory
  weights on ``2c - 1``.

Running ``phi`` over the first half of a step and ``psi`` over the second is
the base method again (after merging duplicated stages).  The reverse order
gives a ``2s``-stage method with the same stability function, which for the
Gauss family is conjugate-symplectic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gauss import gauss_tableau, interpolatory_weights
from .tableau import ButcherTableau, compose, s_reduce, simplifying_residuals

THEOREM_TOL = 1e-13


class TheoremViolation(ArithmeticError):
    """The reduced composition differs from the base method by more than the tolerance."""

    def __init__(self, deviation: float, tol: float):
        super().__init__(f"composition deviates from the base method by {deviation:.3e} (tol {tol:.1e})")
        self.deviation = deviation
        self.tol = tol


@dataclass(frozen=True)
class CompositionPair:
    theta: ButcherTableau
    phi: ButcherTableau
    psi: ButcherTableau


def factorize(theta: ButcherTableau) -> CompositionPair:
    s = theta.s
    c = theta.c
    if s > 1:
        gaps = np.abs(c[:, None] - c[None, :])[~np.eye(s, dtype=bool)]
        if np.min(gaps) <= 1e-10:
            raise ValueError("factorize requires pairwise distinct abscissae")
    worst = max(simplifying_residuals(theta, s).B)
    if worst > 1e-10:
        raise ValueError(f"base quadrature is not of order {s} (B residual {worst:.2e})")
    ones = np.ones(s)
    A1, c1 = 2.0 * theta.A, 2.0 * c
    b1 = interpolatory_weights(c1)
    A2, c2 = 2.0 * theta.A - np.outer(ones, b1), 2.0 * c - 1.0
    b2 = interpolatory_weights(c2)
    label = theta.name or f"{s}-stage method"
    return CompositionPair(
        theta,
        ButcherTableau(A1, b1, c1, f"Phi[{label}]"),
        ButcherTableau(A2, b2, c2, f"Psi[{label}]"),
    )


def composed(pair: CompositionPair) -> ButcherTableau:
    """``phi`` over the first half step, then ``psi``; not reduced."""
    return compose(pair.phi, pair.psi, 0.5, 0.5)


def verify_theorem(pair: CompositionPair, tol: float = THEOREM_TOL) -> float:
    """Max entrywise deviation of the reduced ``phi``-then-``psi`` block from ``theta``.

    Raises :class:`TheoremViolation` above ``tol``.
    """
    deviation = s_reduce(composed(pair)).deviation(pair.theta)
    if not deviation <= tol:
        raise TheoremViolation(deviation, tol)
    return deviation


def conjugate_counterpart(pair: CompositionPair) -> ButcherTableau:
    """``psi`` over the first half step, then ``phi``; all ``2s`` stages kept."""
    tab = compose(pair.psi, pair.phi, 0.5, 0.5)
    label = pair.theta.name or f"{pair.theta.s}-stage method"
    return tab.renamed(f"conjugate of {label}")


@lru_cache(maxsize=None)
def gauss_pair(s: int) -> CompositionPair:
    return factorize(gauss_tableau(s))


def conjugate_gauss(s: int) -> ButcherTableau:
    return conjugate_counterpart(gauss_pair(s))
