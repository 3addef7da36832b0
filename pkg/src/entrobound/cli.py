"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 infeasible or invalid
input, 3 a property check or bound was violated.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import math
import sys

import numpy as np

from . import bounds as B
from .entropy import (RegularisationConfig, check_density, regularised_relative_entropy,
                      relative_entropy, trace_distance, von_neumann_entropy)
from .errors import DomainError, MatrixFormatError
from .hermitian import load_matrix, min_eigenvalue
from .sampling import SamplerConfig
from .sharpness import BOUND_SELECTORS, VIOLATION_TOL, bin_min_slack, fuzz_slack, sharpness_report
from .verify import run_suite

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_VIOLATION = 0, 1, 2, 3

FUZZ_COLUMNS = ("T", "alpha", "beta", "entropy", "bound", "slack")
SWEEP_COLUMNS = ("T", "bound", "entropy_at_equality")
SHARPNESS_COLUMNS = ("T", "alpha", "beta", "bound", "entropy", "relative_gap", "source", "attained")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x) -> str:
    """17 significant digits; ``inf``/``nan`` lowercase."""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _write_csv(path, header, rows):
    fh = sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8", newline="")
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    finally:
        if fh is not sys.stdout:
            fh.close()


def _cd(args, dim):
    return RegularisationConfig(dim) if args.cd is None else RegularisationConfig(dim, args.cd)


# -- subcommands ---------------------------------------------------------------

def cmd_compute(args):
    rho = load_matrix(args.rho)
    sigma = load_matrix(args.sigma)
    if rho.dim != sigma.dim:
        raise DomainError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    if args.states == "density":
        check_density(rho, "rho")
        check_density(sigma, "sigma")
    s = relative_entropy(rho, sigma)
    lines = [
        ("S(rho||sigma)", s),
        ("T", trace_distance(rho, sigma)),
        ("alpha", min_eigenvalue(rho)),
        ("beta", min_eigenvalue(sigma)),
        ("S(rho)", von_neumann_entropy(rho)),
        ("S(sigma)", von_neumann_entropy(sigma)),
    ]
    if args.states == "density":
        cfg = _cd(args, rho.dim)
        lines.append(("R(rho||sigma)", regularised_relative_entropy(rho, sigma, cfg)))
        lines.append(("c_d", cfg.c_d))
    for name, value in lines:
        print(f"{name} = {fmt(value)}")
    return EXIT_OK


def _bound_values(which, T, alpha, beta, cd):
    if which == "prop":
        return [B.bound_proposition(T, alpha)]
    if which == "theorem":
        return [B.bound_theorem(B.BoundInput(T, alpha, beta))]
    if which == "cor1":
        return [B.bound_corollary1(T, beta)]
    return list(B.bound_corollary2(B.BoundInput(T, alpha, beta), cd))


def cmd_bound(args):
    alpha = args.alpha
    beta = args.beta
    if args.which in ("theorem", "cor1") and beta is None:
        raise DomainError(f"--beta is required for --which {args.which}")
    if args.which in ("prop", "theorem") and alpha is None:
        raise DomainError(f"--alpha is required for --which {args.which}")
    alpha = 0.0 if alpha is None else alpha
    beta = 0.0 if beta is None else beta
    cd = _cd(args, 3)
    print(" ".join(fmt(v) for v in _bound_values(args.which, args.T, alpha, beta, cd)))
    return EXIT_OK


def _equality_entropy(which, T, alpha, beta, dim, cd):
    """Relative entropy of the matching equality construction, or ``None``."""
    try:
        if which == "prop":
            a, b = B.extremal_pair_proposition(T, alpha)
            return relative_entropy(a, b)
        if which == "cor1":
            alpha = max(0.0, beta - T)
        if which in ("theorem", "cor1"):
            rho, sigma = B.equality_states_theorem(B.BoundInput(T, alpha, beta), dim)
            return relative_entropy(rho, sigma)
        if alpha == 0 and beta == 0 and T <= 1:
            rho, sigma = B.equality_states_corollary2(T)
            return regularised_relative_entropy(rho, sigma, RegularisationConfig(3, cd.c_d))
    except DomainError:
        return None
    return None


def cmd_sweep(args):
    if args.steps < 1:
        raise DomainError("--steps must be at least 1")
    if args.t_max < args.t_min:
        raise DomainError("--t-max must not be below --t-min")
    alpha = 0.0 if args.alpha is None else args.alpha
    if args.which == "prop":
        beta = 1.0
    elif args.beta is None:
        raise DomainError(f"--beta is required for --which {args.which}")
    else:
        beta = args.beta
    cd = _cd(args, args.dim)
    ts = np.linspace(args.t_min, args.t_max, args.steps) if args.steps > 1 else np.array([args.t_min])
    rows = []
    for T in ts:
        T = float(T)
        value = _bound_values(args.which, T, alpha, beta, cd)[0]
        eq = _equality_entropy(args.which, T, alpha, beta, args.dim, cd)
        rows.append((T, value, "" if eq is None else eq))
    _write_csv(args.out, SWEEP_COLUMNS, rows)
    return EXIT_OK


def cmd_fuzz(args):
    if args.dim < 2:
        raise DomainError("--dim must be at least 2")
    cfg = SamplerConfig(args.dim, args.seed, min_eigenvalue_floor=args.floor)
    out = fuzz_slack(cfg, args.samples, args.which, c_d=args.cd)
    _write_csv(args.out, FUZZ_COLUMNS,
               [(r.T, r.alpha, r.beta, r.entropy, r.bound, r.slack) for r in out.records])
    cells = bin_min_slack(out.records)
    summary = (f"which={args.which} dim={args.dim} samples={args.samples} "
               f"records={len(out.records)} skipped={out.skipped} "
               f"min_slack={fmt(out.min_slack)} bins={len(cells)} violations={out.violations}")
    print(summary, file=sys.stderr if args.out in (None, "-") else sys.stdout)
    if out.violations:
        worst = out.records[0]
        print(f"bound falsified beyond {VIOLATION_TOL:g}: T={fmt(worst.T)} "
              f"alpha={fmt(worst.alpha)} beta={fmt(worst.beta)} slack={fmt(worst.slack)}",
              file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_verify(args):
    checks = run_suite(args.suite, seed=args.seed, samples=args.samples)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed (suite={args.suite}, seed={args.seed})")
    return EXIT_VIOLATION if failed else EXIT_OK


def cmd_sharpness(args):
    grid = []
    for T, alpha, beta in itertools.product(args.T, args.alpha, args.beta):
        try:
            grid.append(B.BoundInput(T, alpha, beta, dim=args.dim))
        except B.InfeasibleError:
            continue
    if not grid:
        raise B.InfeasibleError("no feasible (T, alpha, beta) combination in the grid")
    rows = sharpness_report(grid, args.dim, restarts=args.restarts, seed=args.seed,
                            search=args.search)
    _write_csv(args.out, SHARPNESS_COLUMNS,
               [(r.T, r.alpha, r.beta, r.bound, r.entropy, r.relative_gap, r.source, r.attained)
                for r in rows])
    missed = sum(not r.attained for r in rows)
    if missed:
        print(f"{missed} of {len(rows)} grid points not numerically attained", file=sys.stderr)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser():
    p = _Parser(prog="entrobound",
                description="Relative entropy, trace distance and their sharp bounds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", help="entropies of a pair of matrix files")
    c.add_argument("rho")
    c.add_argument("sigma")
    c.add_argument("--states", choices=("density", "positive"), default="density")
    c.add_argument("--cd", type=float, default=None, help="c_d (default 1/log 2)")
    c.set_defaults(func=cmd_compute)

    b = sub.add_parser("bound", help="evaluate one bound")
    b.add_argument("--which", choices=("prop", "theorem", "cor1", "cor2"), required=True)
    b.add_argument("--T", type=float, required=True)
    b.add_argument("--alpha", type=float, default=None)
    b.add_argument("--beta", type=float, default=None)
    b.add_argument("--cd", type=float, default=None)
    b.set_defaults(func=cmd_bound)

    s = sub.add_parser("sweep", help="tabulate a bound over a range of T")
    s.add_argument("--which", choices=("prop", "theorem", "cor1", "cor2"), required=True)
    s.add_argument("--alpha", type=float, default=None)
    s.add_argument("--beta", type=float, default=None)
    s.add_argument("--t-min", type=float, default=0.0)
    s.add_argument("--t-max", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=11)
    s.add_argument("--dim", type=int, default=3, help="dimension of the equality states")
    s.add_argument("--cd", type=float, default=None)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_sweep)

    f = sub.add_parser("fuzz", help="bound slack over random state pairs")
    f.add_argument("--dim", type=int, default=3)
    f.add_argument("--samples", type=int, default=1000)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--which", choices=BOUND_SELECTORS, default="theorem")
    f.add_argument("--floor", type=float, default=0.0, help="minimal-eigenvalue floor")
    f.add_argument("--cd", type=float, default=None)
    f.add_argument("--out", default=None)
    f.set_defaults(func=cmd_fuzz)

    v = sub.add_parser("verify", help="run property suites")
    v.add_argument("--suite", choices=("integrals", "lemmas", "bounds", "all"), default="all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int, default=None)
    v.set_defaults(func=cmd_verify)

    h = sub.add_parser("sharpness", help="search for bound-attaining diagonal states")
    h.add_argument("--dim", type=int, default=3)
    h.add_argument("--T", type=_float_list, default=[0.05, 0.1, 0.2, 0.3, 0.4])
    h.add_argument("--alpha", type=_float_list, default=[0.02, 0.1, 0.2])
    h.add_argument("--beta", type=_float_list, default=[0.02, 0.1, 0.2])
    h.add_argument("--restarts", type=int, default=10)
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--search", choices=("auto", "always", "never"), default="auto")
    h.add_argument("--out", default=None)
    h.set_defaults(func=cmd_sharpness)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MatrixFormatError as exc:
        print(f"entrobound: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except B.InfeasibleError as exc:
        print(f"entrobound: infeasible input: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DomainError, ValueError) as exc:
        print(f"entrobound: invalid input: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"entrobound: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
