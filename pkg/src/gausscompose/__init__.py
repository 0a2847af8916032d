"""Gauss-Legendre Runge-Kutta methods as compositions of two half-step
factors, their conjugate-symplectic counterparts, discretized
multiderivative schemes, and fourth-order dense output."""

from .composition import (CompositionPair, TheoremViolation, composed, conjugate_counterpart,
                          conjugate_gauss, factorize, gauss_pair, verify_theorem)
from .gauss import gauss_tableau, interpolatory_weights, legendre_nodes
from .integrator import (AMDMP4, AMDTR4, ComposedGauss4, IntegrationError, TableauMethod,
                         Trajectory, collocation_eval, dense_eval, gauss4_composed_step,
                         integrate_fixed, iterate_steps, method_from_descriptor, rk_step)
from .multideriv import (GAUSS_ALPHA, AlphaParam, amdmp4_c2_step, amdmp4_c2_tableau,
                         amdtr4_c2_step, centered_d1, centered_d2)
from .newton import NewtonConvergenceError, NewtonOptions, NonFiniteError, SolverStats
from .problems import (HamiltonianProblem, OdeProblem, builtin_problem, harmonic_oscillator,
                       kepler, pendulum)
from .records import StepRecord, attach_f_half
from .tableau import (ButcherTableau, SymplecticityResidual, adjoint, classical_order,
                      classical_rk4, compose, explicit_euler, implicit_euler, implicit_midpoint,
                      is_symmetric, order_conditions_p4, s_reduce, simplifying_residuals,
                      stability_function, symplecticity_residual, trapezoidal)
from .tableau_io import TableauFormatError, format_tableau, parse_tableau, read_tableau, write_tableau

__version__ = "0.1.0"

__all__ = [
    "AMDMP4",
    "AMDTR4",
    "AlphaParam",
    "ButcherTableau",
    "ComposedGauss4",
    "CompositionPair",
    "GAUSS_ALPHA",
    "HamiltonianProblem",
    "IntegrationError",
    "NewtonConvergenceError",
    "NewtonOptions",
    "NonFiniteError",
    "OdeProblem",
    "SolverStats",
    "StepRecord",
    "SymplecticityResidual",
    "TableauFormatError",
    "TableauMethod",
    "TheoremViolation",
    "Trajectory",
    "adjoint",
    "amdmp4_c2_step",
    "amdmp4_c2_tableau",
    "amdtr4_c2_step",
    "attach_f_half",
    "builtin_problem",
    "centered_d1",
    "centered_d2",
    "classical_order",
    "classical_rk4",
    "collocation_eval",
    "compose",
    "composed",
    "conjugate_counterpart",
    "conjugate_gauss",
    "dense_eval",
    "explicit_euler",
    "factorize",
    "format_tableau",
    "gauss4_composed_step",
    "gauss_pair",
    "gauss_tableau",
    "harmonic_oscillator",
    "implicit_euler",
    "implicit_midpoint",
    "integrate_fixed",
    "interpolatory_weights",
    "is_symmetric",
    "iterate_steps",
    "kepler",
    "legendre_nodes",
    "method_from_descriptor",
    "order_conditions_p4",
    "parse_tableau",
    "pendulum",
    "read_tableau",
    "rk_step",
    "s_reduce",
    "simplifying_residuals",
    "stability_function",
    "symplecticity_residual",
    "trapezoidal",
    "verify_theorem",
    "write_tableau",
]
