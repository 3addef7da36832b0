"""Property suites behind ``entrobound verify``.

Each check returns a :class:`Check` holding the worst observed value, the
tolerance it was held to and, on failure, enough context to reproduce it
(seed and sample index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bounds as B
from .entropy import RegularisationConfig, regularised_relative_entropy, relative_entropy
from .hermitian import (HermitianMatrix, eigh_stack, jordan_decompose, matrix_log,
                        min_eigenvalue, operator_norm, trace_norm)
from .integrals import (LinearPath, QuadratureSpec, log_directional_derivative_check,
                        log_quadrature, relative_entropy_path_integral, t_super,
                        t_super_quadrature)
from .sampling import SamplerConfig, pd_pair_batch, sample_traceless_hermitian
from .sharpness import fuzz_slack

__all__ = ["Check", "SUITES", "run_suite"]

ROUNDOFF_FLOOR = 1e-12


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    worst: float
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.suite}: {self.name}  worst={self.worst:.3e}  tol={self.tolerance:.0e}"
        return text + (f"  ({self.detail})" if self.detail else "")


def _at_most(suite, name, values, tol, where=""):
    values = np.asarray(values, dtype=float)
    worst = float(np.max(values)) if values.size else 0.0
    detail = ""
    if values.size and worst > tol:
        detail = f"first failure at index {int(np.argmax(values > tol))}{where}"
    return Check(suite, name, worst, tol, bool(worst <= tol), detail)


def _at_least(suite, name, values, tol, where=""):
    values = np.asarray(values, dtype=float)
    worst = float(np.min(values)) if values.size else 0.0
    detail = ""
    if values.size and worst < tol:
        detail = f"first failure at index {int(np.argmax(values < tol))}{where}"
    return Check(suite, name, worst, tol, bool(worst >= tol), detail)


def _pd_matrices(seed, n, dims=range(2, 7), cap=100.0):
    """``n`` equal-trace PD pairs cycling through ``dims``."""
    dims = list(dims)
    out = []
    for i in range(n):
        d = dims[i % len(dims)]
        a, b = pd_pair_batch(SamplerConfig(d, seed, condition_cap=cap), 1, start=i)
        out.append((HermitianMatrix(a[0]), HermitianMatrix(b[0])))
    return out


def _max_entry(x):
    return float(np.max(np.abs(np.asarray(x))))


# -- integrals ---------------------------------------------------------------

def integral_checks(seed=0, samples=100):
    suite = "integrals"
    pairs = _pd_matrices(seed, samples)
    q50, q100, q200 = QuadratureSpec(50), QuadratureSpec(100), QuadratureSpec(200)
    log_err, monotone_fail = [], []
    for a, _ in pairs:
        ref = matrix_log(a).entries
        errs = [_max_entry(log_quadrature(a, q).entries - ref) for q in (q50, q100, q200)]
        log_err.append(errs[-1])
        monotone_fail.append(max(0.0, errs[1] - max(errs[0], ROUNDOFF_FLOOR),
                                 errs[2] - max(errs[1], ROUNDOFF_FLOOR)))
    checks = [
        _at_most(suite, "log quadrature (200 nodes) vs spectral log", log_err, 1e-6),
        _at_most(suite, "log quadrature error non-increasing 50->100->200", monotone_fail, 0.0),
    ]
    closed, quad, order, lin, path_err, fd = [], [], [], [], [], []
    for i, (a, b) in enumerate(pairs):
        eye = np.eye(a.dim)
        closed.append(_max_entry(t_super(a, a).entries - eye))
        if i < 20:
            quad.append(_max_entry(t_super_quadrature(a, a, q200).entries - eye))
        x = sample_traceless_hermitian(SamplerConfig(a.dim, seed), 1.0, index=2 * i)
        y = x + HermitianMatrix(b.entries / b.trace())
        order.append(min_eigenvalue(t_super(a, y) - t_super(a, x)))
        d2 = sample_traceless_hermitian(SamplerConfig(a.dim, seed), 1.0, index=2 * i + 1)
        lhs = t_super(a, 0.7 * x - 1.3 * d2).entries
        rhs = 0.7 * t_super(a, x).entries - 1.3 * t_super(a, d2).entries
        lin.append(_max_entry(lhs - rhs))
        path_err.append(abs(relative_entropy_path_integral(LinearPath(a, b), q200)
                          - relative_entropy(a, b)))
        if i < 50:
            unit = x / operator_norm(x)
            fd.append(log_directional_derivative_check(a, unit, 1e-5))
    checks += [
        _at_most(suite, "T_A(A) = I, closed form", closed, 1e-10),
        _at_most(suite, "T_A(A) = I, 200-node quadrature", quad, 1e-6),
        _at_least(suite, "T_A preserves the PSD order", order, -1e-9),
        _at_most(suite, "T_A linearity", lin, 1e-10),
        _at_most(suite, "path-integral vs spectral relative entropy", path_err, 1e-6),
        _at_most(suite, "finite-difference derivative of log vs T_A (h=1e-5)", fd, 1e-5),
    ]
    return checks


# -- lemmas --------------------------------------------------------------------

def lemma_checks(seed=0, samples=2000):
    suite = "lemmas"
    checks = []
    gaps, slacks = [], []
    for d in range(2, 7):
        a, b = pd_pair_batch(SamplerConfig(d, seed), samples)
        gaps.append(B.feasibility_gap_stack(a, b))
        a, b = pd_pair_batch(SamplerConfig(d, seed, rank=max(1, d - 1)), samples, start=samples)
        gaps.append(B.feasibility_gap_stack(a, b))
        if d <= 5:
            a, b = pd_pair_batch(SamplerConfig(d, seed + 1, condition_cap=1e4),
                                 max(1, samples // 10))
            slacks.append(B.lemma3_slack_stack(a, b))
    checks.append(_at_least(suite, "trace distance >= |alpha - beta|", np.concatenate(gaps),
                            -1e-10, f", seed {seed}"))
    checks.append(_at_least(suite, "t/(gamma+t) - T_b(b-a) is PSD", np.concatenate(slacks),
                            -1e-9, f", seed {seed}"))
    tl, lid, orth = [], [], []
    for i in range(max(1, samples // 10)):
        d = 2 + i % 5
        delta = sample_traceless_hermitian(SamplerConfig(d, seed), 1.0 + i % 3, index=i)
        tl.append(operator_norm(delta) - trace_norm(delta) / 2)
        parts = jordan_decompose(delta)
        orth.append(abs(np.trace(parts.plus.entries @ parts.minus.entries)))
        a, b = pd_pair_batch(SamplerConfig(d, seed + 2), 1, start=i)
        wa, _ = eigh_stack(a[0])
        wb, _ = eigh_stack(b[0])
        wd, _ = eigh_stack(a[0] - b[0])
        lid.append((wa[0] - wb[0]) - wd[-1])
    checks += [
        _at_most(suite, "||D||_inf <= ||D||_1 / 2 for traceless D", tl, 1e-12),
        _at_most(suite, "Lidskii: lambda_min(A) - lambda_min(B) <= lambda_max(A-B)", lid, 1e-12),
        _at_most(suite, "Jordan parts orthogonal", orth, 1e-10),
    ]
    return checks


# -- bounds ----------------------------------------------------------------------

def bound_checks(seed=0, samples=2000):
    suite = "bounds"
    checks = []
    gaps = []
    for T in np.linspace(0, 2, 20):
        for alpha in np.linspace(0, 2, 20):
            if T < abs(alpha - 1):
                continue
            a, b = B.extremal_pair_proposition(T, alpha)
            gaps.append(abs(relative_entropy(a, b) - B.bound_proposition(T, alpha)))
    checks.append(_at_most(suite, "proposition extremal pair attains the bound", gaps, 1e-10))
    gaps = []
    for inp in theorem_grid():
        try:
            rho, sigma = B.equality_states_theorem(inp, 3)
        except B.InfeasibleError:
            continue
        gaps.append(abs(relative_entropy(rho, sigma) - B.bound_theorem(inp)))
    checks.append(_at_most(suite, "theorem equality states (d=3) attain the bound", gaps, 1e-10))
    gaps = []
    cfg1 = RegularisationConfig(3, 1.0)
    for t in np.linspace(0, 1, 11):
        rho, sigma = B.equality_states_corollary2(t)
        gaps.append(abs(regularised_relative_entropy(rho, sigma, cfg1) - t * math.log1p(t)))
    checks.append(_at_most(suite, "regularised entropy family equals T log(1+T)", gaps, 1e-12))
    for which in ("theorem", "cor1", "cor2", "cor2-simple"):
        worst = []
        for d in range(2, 7):
            out = fuzz_slack(SamplerConfig(d, seed), samples, which)
            worst.append(out.min_slack)
        checks.append(_at_least(suite, f"fuzz slack, {which}, d=2..6", worst, -1e-9,
                                f", seed {seed}"))
    mono, chain, q_chain = [], [], []
    for beta in (0.05, 0.1, 0.2, 0.5, 1.0):
        for T in np.linspace(0.01, 1, 25):
            alphas = np.linspace(max(0.0, beta - T), beta + T, 30)
            vals = [B.bound_theorem(B.BoundInput(T, a, beta)) for a in alphas]
            mono.append(float(np.max(np.diff(vals))))
            c1 = B.bound_corollary1(T, beta)
            chain.append(max(vals) - c1)
            for a in alphas[::5]:
                q, q2 = B.bound_corollary2(B.BoundInput(T, a, beta), cfg1)
                q_chain.append(q - q2)
    checks += [
        _at_most(suite, "theorem bound decreasing in alpha", mono, 0.0),
        _at_most(suite, "theorem bound <= worst-case-alpha bound", chain, 1e-12),
        _at_most(suite, "Q <= c_d T log(1+T)", q_chain, 1e-12),
    ]
    return checks


def theorem_grid():
    """The ``(alpha, beta, T)`` grid used for the d=3 equality checks."""
    values = np.round(np.arange(1, 11) * 0.02, 10)
    ts = np.round(np.arange(1, 9) * 0.05, 10)
    grid = []
    for alpha in values:
        for beta in values:
            for T in ts:
                if T >= abs(alpha - beta):
                    grid.append(B.BoundInput(float(T), float(alpha), float(beta)))
    return grid


SUITES = {
    "integrals": integral_checks,
    "lemmas": lemma_checks,
    "bounds": bound_checks,
}


def run_suite(name, seed=0, samples=None):
    """Run one suite (or ``"all"``) and return its list of checks."""
    if name == "all":
        return [c for key in SUITES for c in run_suite(key, seed, samples)]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    kwargs = {} if samples is None else {"samples": samples}
    return SUITES[name](seed=seed, **kwargs)
