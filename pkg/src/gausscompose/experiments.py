"""Numerical experiments: the boundary value table, energy studies, convergence
studies, and the factorization and tableau-check reports behind the CLI."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .composition import THEOREM_TOL, CompositionPair, composed, conjugate_counterpart, factorize
from .integrator import (ComposedGauss4, as_method, collocation_eval, dense_eval, integrate_fixed,
                         iterate_steps)
from .newton import NewtonOptions, SolverStats
from .problems import HamiltonianProblem, OdeProblem
from .records import StepRecord
from .tableau import (ORDER_CONDITION_LABELS, ButcherTableau, adjoint, classical_order,
                      is_symmetric, order_conditions_p4, s_reduce, simplifying_residuals,
                      stability_function, symplecticity_residual)

# Printed reference rows for the boundary value problem at eps = 0.1.
TABLE1_EPS = 0.1
TABLE1_H = tuple(1.0 / 2 ** k for k in range(3, 10))
TABLE1_DENSE = (4.7402e-5, 3.4239e-6, 2.3042e-7, 1.4949e-8, 9.5203e-10, 6.0064e-11, 3.7718e-12)
TABLE1_DENSE_RATE = (0.0, 3.79, 3.89, 3.94, 3.97, 3.98, 3.99)
TABLE1_COLLOC = (4.2624e-4, 5.7704e-5, 7.4913e-6, 9.5368e-7, 1.2028e-7, 1.5102e-8, 1.8919e-9)
TABLE1_COLLOC_RATE = (0.0, 2.88, 2.94, 2.97, 2.98, 2.99, 2.99)
TABLE1_REL_TOL = 5e-3
TABLE1_RATE_TOL = 0.02

DENSE_SAMPLES = 33


def _fmt(x: float) -> str:
    return f"{x:.4e}"


# -- convergence reports -----------------------------------------------------

@dataclass(frozen=True)
class ConvergenceReport:
    """Rows of (stepsize, error, rate) with ``rate = log2(err_{2h} / err_h)``.

    Stepsizes must halve from row to row; the first rate is 0 by convention.
    """

    h: tuple
    error: tuple
    label: str = "error"

    def __post_init__(self):
        h = tuple(float(v) for v in self.h)
        err = tuple(float(v) for v in self.error)
        if len(h) != len(err) or not h:
            raise ValueError("need matching, non-empty stepsize and error lists")
        for a, b in zip(h, h[1:]):
            if not abs(a / b - 2.0) <= 1e-12:
                raise ValueError("stepsizes must decrease by a factor of 2")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "error", err)

    @property
    def rate(self) -> tuple:
        r = [0.0]
        for e0, e1 in zip(self.error, self.error[1:]):
            r.append(math.log2(e0 / e1) if e0 > 0 and e1 > 0 else float("nan"))
        return tuple(r)

    @property
    def final_rate(self) -> float:
        return self.rate[-1]

    def rows(self):
        return list(zip(self.h, self.error, self.rate))

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"h,{self.label},rate\n")
        for h, e, r in self.rows():
            out.write(f"{h!r},{e!r},{r!r}\n")
        return out.getvalue()

    def format(self) -> str:
        lines = [f"{'h':>12}  {self.label:>12}  {'rate':>6}"]
        for h, e, r in self.rows():
            lines.append(f"{_fmt_h(h):>12}  {_fmt(e):>12}  {r:6.2f}")
        return "\n".join(lines)


def _fmt_h(h: float) -> str:
    inv = 1.0 / h
    if abs(inv - round(inv)) <= 1e-9 * inv and round(inv) > 1:
        return f"1/{round(inv)}"
    return f"{h:g}"


def combine_reports_csv(reports) -> str:
    """Side-by-side CSV ``h,<label>,<label>_rate,...`` of reports on the same stepsizes."""
    reports = list(reports)
    hs = reports[0].h
    if any(r.h != hs for r in reports):
        raise ValueError("reports use different stepsizes")
    out = io.StringIO()
    out.write("h," + ",".join(f"{r.label},{r.label}_rate" for r in reports) + "\n")
    for i, h in enumerate(hs):
        cells = [repr(h)]
        for r in reports:
            cells += [repr(r.error[i]), repr(r.rate[i])]
        out.write(",".join(cells) + "\n")
    return out.getvalue()


# -- boundary value problem ----------------------------------------------------

def bvp_system(eps: float) -> OdeProblem:
    """``eps y'' = y`` as the first-order system ``(y, y')' = (y', y / eps)``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    M = np.array([[0.0, 1.0], [1.0 / eps, 0.0]])
    return OdeProblem(2, lambda t, Y: Y @ M.T, lambda t, y: M, name=f"bvp(eps={eps:g})",
                      vectorized=True)


def bvp_exact(eps: float, x):
    """Solution of ``eps y'' = y``, ``y(0) = 1``, ``y(1) = 0``."""
    k = 1.0 / math.sqrt(eps)
    x = np.asarray(x, dtype=float)
    if k > 1.0:
        return (np.exp(-k * x) - np.exp(k * (x - 2.0))) / (1.0 - math.exp(-2.0 * k))
    # for small k the exponential form cancels; sinh form is identical and stable
    return np.sinh(k * (1.0 - x)) / math.sinh(k)


def _steps_for(h: float, length: float = 1.0) -> int:
    if not h > 0:
        raise ValueError("stepsize must be positive")
    n = round(length / h)
    if n < 1 or abs(n * h - length) > 1e-12 * length:
        raise ValueError(f"stepsize {h!r} does not divide the interval of length {length!r}")
    return n


def _combine(ra: StepRecord, rb: StepRecord, s: float) -> StepRecord:
    return replace(
        ra,
        y_start=ra.y_start + s * rb.y_start,
        y=ra.y + s * rb.y,
        stages=ra.stages + s * rb.stages,
        stage_derivs=ra.stage_derivs + s * rb.stage_derivs,
        y_half=ra.y_half + s * rb.y_half,
        f_half=ra.f_half + s * rb.f_half,
    )


def shoot_bvp(eps: float, h: float, newton: NewtonOptions | None = None,
              stats: SolverStats | None = None) -> list:
    """Linear shooting with composed Gauss-4 steps of size ``h``.

    The basis runs start from ``(1, 0)`` and ``(0, 1)``; their combination
    with ``y(1) = 0`` is exact for this linear problem.  Returns the step
    records of the combined solution, each carrying ``f_half``.
    """
    n = _steps_for(h)
    prob = bvp_system(eps)
    method = ComposedGauss4()
    runs = []
    for y0 in ((1.0, 0.0), (0.0, 1.0)):
        traj = integrate_fixed(method, prob, 0.0, np.array(y0), h, n, newton, stats)
        runs.append(traj.with_f_half(prob).records)
    ya_end, yb_end = runs[0][-1].y[0], runs[1][-1].y[0]
    if yb_end == 0.0:
        raise ArithmeticError("shooting basis is degenerate")
    s = -ya_end / yb_end
    return [_combine(a, b, s) for a, b in zip(*runs)]


@dataclass(frozen=True)
class BvpErrors:
    h: float
    dense: float
    collocation: float
    x: np.ndarray = field(repr=False)
    dense_err: np.ndarray = field(repr=False)
    colloc_err: np.ndarray = field(repr=False)


def bvp_errors(eps: float, h: float, samples: int = DENSE_SAMPLES,
               newton: NewtonOptions | None = None, stats: SolverStats | None = None) -> BvpErrors:
    """Maximum errors of both continuous extensions of the solution component,
    taken over ``samples`` equispaced points per step."""
    if samples < 2:
        raise ValueError("need at least two samples per step")
    records = shoot_bvp(eps, h, newton, stats)
    theta = np.linspace(0.0, 1.0, samples)
    xs, de, ce = [], [], []
    for rec in records:
        x = rec.t + theta * rec.h
        exact = bvp_exact(eps, x)
        de.append(np.abs(dense_eval(rec, theta - 0.5)[:, 0] - exact))
        ce.append(np.abs(collocation_eval(rec, theta)[:, 0] - exact))
        xs.append(x)
    x, de, ce = (np.concatenate(v) for v in (xs, de, ce))
    return BvpErrors(h, float(de.max()), float(ce.max()), x, de, ce)


def table1(eps: float = TABLE1_EPS, hs=TABLE1_H, samples: int = DENSE_SAMPLES,
           newton: NewtonOptions | None = None):
    """Errors of the dense and collocation extensions over a halving stepsize list.

    Returns ``(dense_report, collocation_report, per_h_errors)``.
    """
    runs = [bvp_errors(eps, h, samples, newton) for h in hs]
    dense = ConvergenceReport([r.h for r in runs], [r.dense for r in runs], "dense_error")
    colloc = ConvergenceReport([r.h for r in runs], [r.collocation for r in runs],
                               "collocation_error")
    return dense, colloc, runs


def profile_csv(run: BvpErrors) -> str:
    """Pointwise error profile ``x,dense_error,collocation_error`` of one run."""
    out = io.StringIO()
    out.write("x,dense_error,collocation_error\n")
    for x, d, c in zip(run.x, run.dense_err, run.colloc_err):
        out.write(f"{float(x)!r},{float(d)!r},{float(c)!r}\n")
    return out.getvalue()


@dataclass(frozen=True)
class Table1Check:
    dense_rel: tuple
    colloc_rel: tuple
    dense_rate_dev: tuple
    colloc_rate_dev: tuple
    passed: bool


def check_table1(dense: ConvergenceReport, colloc: ConvergenceReport) -> Table1Check:
    """Compare against the printed rows (only meaningful for the default setup)."""
    if dense.h != TABLE1_H or colloc.h != TABLE1_H:
        raise ValueError("reference rows exist only for the default stepsizes")
    dr = tuple(abs(e / r - 1.0) for e, r in zip(dense.error, TABLE1_DENSE))
    cr = tuple(abs(e / r - 1.0) for e, r in zip(colloc.error, TABLE1_COLLOC))
    drd = tuple(abs(a - b) for a, b in zip(dense.rate, TABLE1_DENSE_RATE))
    crd = tuple(abs(a - b) for a, b in zip(colloc.rate, TABLE1_COLLOC_RATE))
    ok = (max(dr + cr) <= TABLE1_REL_TOL and max(drd + crd) <= TABLE1_RATE_TOL)
    return Table1Check(dr, cr, drd, crd, ok)


# -- energy studies ----------------------------------------------------------

ENERGY_WINDOWS = 10


@dataclass(frozen=True)
class EnergyStudy:
    method: str
    problem: str
    h: float
    t: np.ndarray = field(repr=False)
    error: np.ndarray = field(repr=False)   # H(y_n) - H(y_0)
    max_drift: float
    half_ratio: float
    slope: float
    window_max: tuple
    stats: SolverStats

    @property
    def monotone(self) -> bool:
        w = self.window_max
        return all(b > a for a, b in zip(w, w[1:]))

    def summary(self) -> str:
        return (f"max_drift={self.max_drift:.6e} half_ratio={self.half_ratio:.6e} "
                f"slope={self.slope:.6e} monotone_windows={'yes' if self.monotone else 'no'}")

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("t,energy_error\n")
        for t, e in zip(self.t, self.error):
            out.write(f"{float(t)!r},{float(e)!r}\n")
        return out.getvalue()


def energy_study(problem: HamiltonianProblem, method, h: float, steps: int,
                 newton: NewtonOptions | None = None, windows: int = ENERGY_WINDOWS) -> EnergyStudy:
    """Energy error along ``steps`` fixed steps from ``problem.y0``.

    Summaries: the largest ``|H - H0|``; the ratio of its maximum over the
    second half of the run to that over the first half; the least-squares
    slope of ``|H - H0|`` against time; and the maxima over ``windows``
    equal windows.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    method = as_method(method)
    stats = SolverStats()
    y0 = np.asarray(problem.y0, dtype=float)
    Y = np.empty((steps + 1, y0.size))
    Y[0] = y0
    for k, rec in enumerate(iterate_steps(method, problem, 0.0, y0, h, steps, newton, stats), 1):
        Y[k] = rec.y
    H = problem.energies(Y)
    err = H - H[0]
    t = h * np.arange(steps + 1)
    a = np.abs(err)
    half = (steps + 1) // 2
    first, second = a[:half].max(), a[half:].max()
    ratio = second / first if first > 0 else (0.0 if second == 0 else math.inf)
    slope = float(np.polyfit(t, a, 1)[0])
    chunks = np.array_split(a[1:], min(windows, steps))
    return EnergyStudy(method.name, problem.name, h, t, err, float(a.max()), float(ratio), slope,
                       tuple(float(c.max()) for c in chunks), stats)


# -- convergence studies -----------------------------------------------------

def convergence_study(method, problem, h0: float, levels: int, t_end: float,
                      newton: NewtonOptions | None = None, y0=None) -> ConvergenceReport:
    """Errors at ``t_end`` for ``h0, h0/2, ...`` against the same method at
    ``h0 / 2**(levels + 2)``."""
    if levels < 3:
        raise ValueError("levels must be at least 3")
    method = as_method(method)
    ode_y0 = np.asarray(problem.y0 if y0 is None else y0, dtype=float)

    def final(h):
        n = _steps_for(h, t_end)
        *_, last = iterate_steps(method, problem, 0.0, ode_y0, h, n, newton)
        return last.y

    ref = final(h0 / 2 ** (levels + 2))
    hs = [h0 / 2 ** k for k in range(levels)]
    errs = [float(np.max(np.abs(final(h) - ref))) for h in hs]
    return ConvergenceReport(hs, errs, "error")


# -- factorization / tableau reports -----------------------------------------

ADJOINT_TOL = 1e-13
WEIGHT_AVG_TOL = 1e-14
STAGE_CONSISTENCY_TOL = 1e-14
CONSISTENCY_TOL = 1e-12


LARGE_S_TOL = 1e-12


def _scaled(tol: float, s: int) -> float:
    # Vandermonde conditioning costs about three digits between s = 5 and s = 10
    return tol if s <= 5 else max(tol, LARGE_S_TOL)


@dataclass(frozen=True)
class FactorizationReport:
    pair: CompositionPair
    composed: ButcherTableau
    reduced: ButcherTableau
    conjugate: ButcherTableau
    theorem_deviation: float
    adjoint_deviation: float | None       # None when theta is not symmetric
    weight_average_deviation: float
    psi_stage_consistency: float
    symplecticity: dict
    thresholds: dict

    @property
    def checks(self) -> dict:
        out = {
            "theorem": self.theorem_deviation <= self.thresholds["theorem"],
            "weight_average": self.weight_average_deviation <= self.thresholds["weight_average"],
            "psi_stage_consistency":
                self.psi_stage_consistency <= self.thresholds["psi_stage_consistency"],
        }
        if self.adjoint_deviation is not None:
            out["adjoint"] = self.adjoint_deviation <= self.thresholds["adjoint"]
        return out

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def factorization_report(theta: ButcherTableau) -> FactorizationReport:
    pair = factorize(theta)
    block = composed(pair).renamed(f"{pair.phi.name} then {pair.psi.name}")
    reduced = s_reduce(block).renamed(f"reduced {block.name}")
    theorem_dev = reduced.deviation(theta)
    if is_symmetric(theta, tol=1e-12):
        adj = max(adjoint(pair.phi).deviation(pair.psi), adjoint(pair.psi).deviation(pair.phi))
    else:
        adj = None
    wavg = float(np.max(np.abs((pair.phi.b + pair.psi.b) / 2.0 - theta.b)))
    cons = float(pair.psi.row_sum_defect())
    conj = conjugate_counterpart(pair)
    sym = {name: symplecticity_residual(t).norm
           for name, t in (("theta", theta), ("phi", pair.phi), ("psi", pair.psi),
                           ("conjugate", conj))}
    s = theta.s
    thresholds = {
        "theorem": _scaled(THEOREM_TOL, s),
        "adjoint": _scaled(ADJOINT_TOL, s),
        "weight_average": _scaled(WEIGHT_AVG_TOL, s),
        "psi_stage_consistency": _scaled(STAGE_CONSISTENCY_TOL, s),
    }
    return FactorizationReport(pair, block, reduced, conj, theorem_dev, adj, wavg, cons, sym,
                               thresholds)


STABILITY_SAMPLES = (-1.0, -0.5 + 0.5j, 1j, 2j, 1.0)


@dataclass(frozen=True)
class CheckReport:
    tableau: ButcherTableau
    weight_defect: float
    row_sum_defect: float
    order_residuals: tuple
    order: int
    simplifying: object
    simplifying_order: int
    symplecticity: float
    symmetric: bool
    stability: tuple          # (z, R(z)) pairs; R is None where I - zA is singular

    @property
    def passed(self) -> bool:
        return self.weight_defect <= CONSISTENCY_TOL

    def format(self) -> str:
        t = self.tableau
        lines = [f"tableau {t.name or '(unnamed)'}: s = {t.s}",
                 f"consistency |sum(b) - 1| = {self.weight_defect:.3e} "
                 f"[{'ok' if self.passed else 'FAIL'}, threshold {CONSISTENCY_TOL:.0e}]",
                 f"stage consistency max|A 1 - c| = {self.row_sum_defect:.3e}",
                 "order conditions through order 4:"]
        for label, r in zip(ORDER_CONDITION_LABELS, self.order_residuals):
            lines.append(f"  {label:<22} {r: .3e}")
        lines.append(f"classical order (<= 4): {self.order}")
        lines.append(f"simplifying assumptions, k = 1..{self.simplifying_order}:")
        sr = self.simplifying
        for k in range(self.simplifying_order):
            lines.append(f"  k={k + 1}: B {sr.B[k]:.3e}  C {sr.C[k]:.3e}  D {sr.D[k]:.3e}")
        lines.append(f"symplecticity norm = {self.symplecticity:.3e} "
                     f"({'symplectic' if self.symplecticity <= 1e-13 else 'not symplectic'})")
        lines.append(f"symmetric: {'yes' if self.symmetric else 'no'}")
        lines.append("stability function samples:")
        for z, R in self.stability:
            val = "singular" if R is None else f"{R.real: .10e} {R.imag:+.10e}j  |R| = {abs(R):.6f}"
            lines.append(f"  R({complex(z)}) = {val}")
        return "\n".join(lines)


def check_report(tab: ButcherTableau) -> CheckReport:
    weight = tab.weight_defect()
    p = 2 * tab.s
    try:
        symmetric = is_symmetric(tab, tol=1e-13)
    except ValueError:
        symmetric = False
    stab = []
    for z in STABILITY_SAMPLES:
        try:
            stab.append((z, complex(stability_function(tab, z))))
        except ArithmeticError:
            stab.append((z, None))
    return CheckReport(tab, weight, tab.row_sum_defect(), tuple(order_conditions_p4(tab)),
                       classical_order(tab), simplifying_residuals(tab, p), p,
                       symplecticity_residual(tab).norm, symmetric, tuple(stab))


__all__ = [
    "ConvergenceReport", "combine_reports_csv", "bvp_system", "bvp_exact", "shoot_bvp",
    "bvp_errors", "BvpErrors", "table1", "profile_csv", "check_table1", "Table1Check",
    "EnergyStudy", "energy_study", "convergence_study", "FactorizationReport",
    "factorization_report", "CheckReport", "check_report", "TABLE1_EPS", "TABLE1_H",
    "TABLE1_DENSE", "TABLE1_DENSE_RATE", "TABLE1_COLLOC", "TABLE1_COLLOC_RATE",
    "DENSE_SAMPLES",
]
