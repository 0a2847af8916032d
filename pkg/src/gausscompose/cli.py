"""Command-line driver.

Exit codes: 0 when every threshold of the command passes, 1 when a
threshold is violated, 2 for usage, parse or input errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import experiments as ex
from .gauss import MAX_STAGES, gauss_tableau
from .integrator import IntegrationError, method_from_descriptor
from .newton import NewtonOptions
from .problems import BUILTIN_PROBLEMS, builtin_problem
from .tableau_io import TableauFormatError, format_tableau, read_tableau, write_tableau

EXIT_OK, EXIT_THRESHOLD, EXIT_INPUT = 0, 1, 2

PROBLEM_HELP = ("built-in problems: harmonic (H = (p^2 + q^2)/2, y0 = (1, 0)); "
                "pendulum (H = p^2/2 - cos q, y0 = (2, 0)); "
                "kepler (eccentricity 0.6, started at pericentre)")
METHOD_HELP = ("gauss4 (composed Gauss-4), gauss:S, conjugate4, conjugate:S, phi[:S], psi[:S], "
               "amdmp4:ALPHA, amdtr4:ALPHA (ALPHA may be 'gauss'), rk4 (classical explicit "
               "control)")


class InputError(Exception):
    pass


def _stepsize(text: str) -> float:
    try:
        v = float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a stepsize: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"stepsize must be positive: {text!r}")
    return v


def _h_list(items) -> list:
    out = []
    for item in items:
        out += [_stepsize(p) for p in item.replace(",", " ").split()]
    return out


def _newton(args) -> NewtonOptions:
    try:
        return NewtonOptions(tol=args.newton_tol, max_iter=args.newton_max_iter)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _csv_target(args, default_name: str):
    if args.csv:
        return Path(args.csv)
    if args.out_dir:
        return Path(args.out_dir) / default_name
    return None


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


# -- commands ----------------------------------------------------------------

def cmd_factorize(args) -> int:
    if args.tableau:
        theta = read_tableau(args.tableau)
    else:
        if not 1 <= args.stages <= MAX_STAGES:
            raise InputError(f"--stages must be in 1..{MAX_STAGES}")
        theta = gauss_tableau(args.stages)
    rep = ex.factorization_report(theta)
    blocks = (("theta", theta), ("phi", rep.pair.phi), ("psi", rep.pair.psi),
              ("composed", rep.composed), ("reduced", rep.reduced), ("conjugate", rep.conjugate))
    for label, tab in blocks:
        print(f"# {label}: {tab.name}")
        print(format_tableau(tab), end="")
        print()
    th = rep.thresholds
    print(f"theorem deviation          {rep.theorem_deviation:.3e}  (<= {th['theorem']:.0e})")
    if rep.adjoint_deviation is None:
        print("adjoint deviation          n/a (base method not symmetric)")
    else:
        print(f"adjoint deviation          {rep.adjoint_deviation:.3e}  (<= {th['adjoint']:.0e})")
    print(f"weight-average deviation   {rep.weight_average_deviation:.3e}  "
          f"(<= {th['weight_average']:.0e})")
    print(f"psi stage consistency      {rep.psi_stage_consistency:.3e}  "
          f"(<= {th['psi_stage_consistency']:.0e})")
    for name, norm in rep.symplecticity.items():
        print(f"symplecticity norm {name:<9} {norm:.3e}")
    if args.out_dir:
        out = Path(args.out_dir)
        for label, tab in blocks:
            out.mkdir(parents=True, exist_ok=True)
            write_tableau(tab, out / f"{label}.txt")
    for name, ok in rep.checks.items():
        print(f"{_verdict(ok)} {name}")
    return EXIT_OK if rep.passed else EXIT_THRESHOLD


def cmd_table1(args) -> int:
    if not args.eps > 0:
        raise InputError("--eps must be positive")
    hs = _h_list(args.h_list) if args.h_list else list(ex.TABLE1_H)
    try:
        dense, colloc, runs = ex.table1(args.eps, hs, args.samples, _newton(args))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    print(f"eps = {args.eps:g}, {args.samples} samples per step")
    print(dense.format())
    print()
    print(colloc.format())
    target = _csv_target(args, "table1.csv")
    if target:
        _write(target, ex.combine_reports_csv([dense, colloc]))
    fig = Path(args.figure_csv) if args.figure_csv else (
        Path(args.out_dir) / "figure1.csv" if args.out_dir else None)
    if fig:
        _write(fig, ex.profile_csv(runs[0]))
    reference = (args.eps == ex.TABLE1_EPS and tuple(hs) == ex.TABLE1_H
                 and args.samples == ex.DENSE_SAMPLES)
    if not reference:
        return EXIT_OK
    chk = ex.check_table1(dense, colloc)
    print(f"{_verdict(chk.passed)} reference rows: max relative deviation "
          f"{max(chk.dense_rel + chk.colloc_rel):.2e} (<= {ex.TABLE1_REL_TOL:.0e}), "
          f"max rate deviation {max(chk.dense_rate_dev + chk.colloc_rate_dev):.3f} "
          f"(<= {ex.TABLE1_RATE_TOL})")
    return EXIT_OK if chk.passed else EXIT_THRESHOLD


def _problem(name):
    try:
        return builtin_problem(name)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _method(desc):
    try:
        return method_from_descriptor(desc)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_energy(args) -> int:
    if args.steps < 2:
        raise InputError("--steps must be at least 2")
    problem, method = _problem(args.problem), _method(args.method)
    study = ex.energy_study(problem, method, args.h, args.steps, _newton(args))
    print(f"problem={problem.name} method={method.name} h={args.h!r} steps={args.steps}")
    print(study.summary())
    target = _csv_target(args, "energy.csv")
    if target:
        _write(target, study.to_csv())
    ok = True
    if args.max_drift is not None:
        good = study.max_drift <= args.max_drift
        print(f"{_verdict(good)} max drift <= {args.max_drift:g}")
        ok &= good
    if args.max_ratio is not None:
        good = study.half_ratio <= args.max_ratio
        print(f"{_verdict(good)} half ratio <= {args.max_ratio:g}")
        ok &= good
    if args.expect_drift:
        good = study.monotone and study.slope > 0
        print(f"{_verdict(good)} strictly increasing windowed drift")
        ok &= good
    return EXIT_OK if ok else EXIT_THRESHOLD


def cmd_convergence(args) -> int:
    problem, method = _problem(args.problem), _method(args.method)
    try:
        rep = ex.convergence_study(method, problem, args.h0, args.levels, args.t_end,
                                   _newton(args))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    print(f"problem={problem.name} method={method.name} t_end={args.t_end!r}")
    print(rep.format())
    target = _csv_target(args, "convergence.csv")
    if target:
        _write(target, rep.to_csv())
    if args.expected_order is None:
        return EXIT_OK
    ok = abs(rep.final_rate - args.expected_order) <= args.order_tol
    print(f"{_verdict(ok)} final rate {rep.final_rate:.3f} within "
          f"{args.expected_order:g} +- {args.order_tol:g}")
    return EXIT_OK if ok else EXIT_THRESHOLD


def cmd_check(args) -> int:
    tab = read_tableau(args.tableau)
    rep = ex.check_report(tab)
    text = rep.format()
    print(text)
    if args.out_dir:
        _write(Path(args.out_dir) / "check.txt", text + "\n")
    ok = rep.passed
    if args.expected_order is not None:
        good = rep.order >= args.expected_order
        print(f"{_verdict(good)} classical order >= {args.expected_order}")
        ok &= good
    return EXIT_OK if ok else EXIT_THRESHOLD


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", help="directory for the command's output files")
    common.add_argument("--csv", help="CSV output file (overrides --out-dir for the CSV)")
    common.add_argument("--newton-tol", type=float, default=NewtonOptions.tol,
                        help="max-norm tolerance on the stage increment (default %(default)g)")
    common.add_argument("--newton-max-iter", type=int, default=NewtonOptions.max_iter,
                        help="Newton iteration cap (default %(default)d)")

    p = argparse.ArgumentParser(prog="gausscompose", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("factorize", parents=[common],
                       help="split a method into its two half-step factors and verify")
    g = f.add_mutually_exclusive_group(required=True)
    g.add_argument("--stages", type=int, help=f"Gauss-Legendre base method, 1..{MAX_STAGES}")
    g.add_argument("--tableau", help="base method from a tableau file")
    f.set_defaults(func=cmd_factorize)

    t = sub.add_parser("table1", parents=[common],
                       help="dense vs collocation errors on eps y'' = y, y(0)=1, y(1)=0")
    t.add_argument("--eps", type=float, default=ex.TABLE1_EPS)
    t.add_argument("--h-list", nargs="+",
                   help="halving stepsizes, e.g. 1/8 1/16 (default 1/8 .. 1/512)")
    t.add_argument("--samples", type=int, default=ex.DENSE_SAMPLES,
                   help="equispaced error samples per step (default %(default)d)")
    t.add_argument("--figure-csv", help="pointwise error profile for the first stepsize")
    t.set_defaults(func=cmd_table1)

    e = sub.add_parser("energy", parents=[common], help="energy error along a long run",
                       epilog=PROBLEM_HELP)
    e.add_argument("--problem", required=True, choices=sorted(BUILTIN_PROBLEMS))
    e.add_argument("--method", required=True, help=METHOD_HELP)
    e.add_argument("--h", type=_stepsize, default=0.1)
    e.add_argument("--steps", type=int, default=10000)
    e.add_argument("--max-drift", type=float, help="threshold on max |H - H0|")
    e.add_argument("--max-ratio", type=float, help="threshold on second-half / first-half max")
    e.add_argument("--expect-drift", action="store_true",
                   help="require strictly increasing windowed maxima and positive slope")
    e.set_defaults(func=cmd_energy)

    c = sub.add_parser("convergence", parents=[common], help="empirical order study",
                       epilog=PROBLEM_HELP)
    c.add_argument("--method", required=True, help=METHOD_HELP)
    c.add_argument("--problem", default="pendulum", choices=sorted(BUILTIN_PROBLEMS))
    c.add_argument("--h0", type=_stepsize, default=0.1)
    c.add_argument("--levels", type=int, default=4)
    c.add_argument("--t-end", type=float, default=5.0)
    c.add_argument("--expected-order", type=float)
    c.add_argument("--order-tol", type=float, default=0.1)
    c.set_defaults(func=cmd_convergence)

    k = sub.add_parser("check", parents=[common], help="analyse a tableau file")
    k.add_argument("--tableau", required=True)
    k.add_argument("--expected-order", type=int, help="require at least this classical order")
    k.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, TableauFormatError, OSError, ValueError, IntegrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
