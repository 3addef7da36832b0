"""Upper bounds on the relative entropy in terms of trace distance and minimal eigenvalues.

Notation used throughout: ``T`` is half the trace-norm distance of the two
states, ``alpha`` the smallest eigenvalue of the first state and ``beta``
that of the second.  For equal-trace positive matrices these always satisfy
``T >= |alpha - beta|``; every bound below assumes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import RegularisationConfig
from .errors import DomainError, InfeasibleError
from .hermitian import HermitianMatrix, eigh_stack, min_eigenvalue, trace_norm
from .integrals import t_super, t_super_stack

__all__ = [
    "BoundInput",
    "LemmaThreeInput",
    "feasibility_gap",
    "feasibility_gap_stack",
    "lemma3_slack",
    "lemma3_slack_stack",
    "bound_proposition",
    "bound_theorem",
    "bound_corollary1",
    "bound_corollary2",
    "extremal_pair_proposition",
    "equality_states_theorem",
    "equality_states_corollary2",
    "theorem_bound_array",
    "corollary1_bound_array",
    "corollary2_bound_array",
]

FEASIBILITY_SLACK = 1e-12
ALPHA_ZERO = 1e-300


def _check_feasible(T, alpha, beta):
    if T < -FEASIBILITY_SLACK:
        raise InfeasibleError(f"T must be non-negative, got {T}")
    if T < abs(alpha - beta) - FEASIBILITY_SLACK:
        raise InfeasibleError(
            f"infeasible parameters: trace distance T={T} is below "
            f"|alpha - beta| = {abs(alpha - beta)} (equal-trace constraint)")


@dataclass(frozen=True)
class BoundInput:
    """Scalar triple ``(T, alpha, beta)`` feeding the bound formulas.

    ``beta == 0`` is admitted for the regularised-entropy bounds, where the
    states are shifted by the identity before any logarithm is taken.
    If ``dim`` is given, ``alpha`` and ``beta`` must not exceed ``1/dim``
    (minimal eigenvalues of density matrices).
    """

    T: float
    alpha: float
    beta: float
    dim: int | None = None

    def __post_init__(self):
        for name in ("T", "alpha", "beta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value}")
        if self.alpha < 0 or self.beta < 0:
            raise DomainError(
                f"alpha and beta must be non-negative, got {self.alpha}, {self.beta}")
        _check_feasible(self.T, self.alpha, self.beta)
        if self.dim is not None:
            cap = 1.0 / self.dim + FEASIBILITY_SLACK
            if self.alpha > cap or self.beta > cap:
                raise InfeasibleError(
                    f"minimal eigenvalues of {self.dim}-dimensional density "
                    f"matrices cannot exceed 1/{self.dim}")


@dataclass(frozen=True)
class LemmaThreeInput:
    gamma: float
    t: float

    def __post_init__(self):
        if self.gamma < 0 or self.t < 0:
            raise DomainError("gamma and t must be non-negative")

    def bound(self) -> float:
        """``t / (gamma + t)``, taken as 0 when both vanish."""
        if self.gamma + self.t <= 0:
            return 0.0
        return self.t / (self.gamma + self.t)


# -- scalar helpers ---------------------------------------------------------

def _plus_term(T, beta):
    """``(beta + T) log(1 + T/beta)``."""
    if T == 0:
        return 0.0
    if beta <= 0:
        return math.inf
    return (beta + T) * math.log1p(T / beta)


def _minus_term(T, alpha):
    """``alpha log(1 + T/alpha)`` with the value 0 at ``alpha = 0``."""
    if alpha < ALPHA_ZERO or T == 0:
        return 0.0
    return alpha * math.log1p(T / alpha)


def _xlog_ratio(x, y):
    """``x log(x / y)`` with ``0 log 0 = 0``."""
    return 0.0 if x <= 0 else x * math.log(x / y)


# -- constraints ------------------------------------------------------------

def feasibility_gap(a: HermitianMatrix, b: HermitianMatrix) -> float:
    """``T - |alpha - beta|`` for an equal-trace PSD pair; never negative in exact arithmetic."""
    if a.dim != b.dim:
        raise DomainError(f"dimension mismatch: {a.dim} vs {b.dim}")
    ta, tb = a.trace(), b.trace()
    if abs(ta - tb) > 1e-10 * max(1.0, abs(ta)):
        raise DomainError(f"traces differ: {ta!r} vs {tb!r}")
    alpha, beta = min_eigenvalue(a), min_eigenvalue(b)
    if min(alpha, beta) < -1e-10:
        raise DomainError("both matrices must be positive semidefinite")
    return 0.5 * trace_norm(a - b) - abs(alpha - beta)


def lemma3_slack(a: HermitianMatrix, b: HermitianMatrix, gamma: float) -> float:
    """Smallest eigenvalue of ``t/(gamma+t) I - T_b(b - a)``.

    ``t`` is half the trace distance of ``a`` and ``b``.  A non-negative
    return certifies the operator inequality for this pair.
    """
    if a.dim != b.dim:
        raise DomainError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if gamma < 0:
        raise DomainError(f"gamma must be non-negative, got {gamma}")
    if min_eigenvalue(a) <= 0 or min_eigenvalue(b) <= 0:
        raise DomainError("a and b must be positive definite")
    ta, tb = a.trace(), b.trace()
    if abs(ta - tb) > 1e-10 * max(1.0, abs(ta)):
        raise DomainError(f"traces differ: {ta!r} vs {tb!r}")
    if min_eigenvalue(a) < gamma - 1e-10:
        raise DomainError(f"a is not bounded below by gamma={gamma}")
    delta = b - a
    lin = LemmaThreeInput(gamma, 0.5 * trace_norm(delta))
    gap = lin.bound() * np.eye(a.dim) - t_super(b, delta).entries
    return min_eigenvalue(HermitianMatrix(gap))


def feasibility_gap_stack(a, b):
    """Vectorised :func:`feasibility_gap` over ``(n, d, d)`` stacks (no validation)."""
    wa, _ = eigh_stack(a)
    wb, _ = eigh_stack(b)
    wd, _ = eigh_stack(a - b)
    return 0.5 * np.sum(np.abs(wd), axis=-1) - np.abs(wa[:, 0] - wb[:, 0])


def lemma3_slack_stack(a, b, gamma=None):
    """Vectorised :func:`lemma3_slack`; ``gamma`` defaults to ``lambda_min(a)``."""
    wa, _ = eigh_stack(a)
    wb, vb = eigh_stack(b)
    delta = b - a
    wd, _ = eigh_stack(delta)
    t = 0.5 * np.sum(np.abs(wd), axis=-1)
    g = wa[:, 0] if gamma is None else np.broadcast_to(np.asarray(gamma, dtype=float), t.shape)
    denom = g + t
    level = np.where(denom > 0, t / np.where(denom > 0, denom, 1.0), 0.0)
    d = a.shape[-1]
    gap = level[:, None, None] * np.eye(d) - t_super_stack(wb, vb, delta)
    return eigh_stack(gap)[0][:, 0]


# -- bounds -----------------------------------------------------------------

def bound_proposition(T: float, alpha: float) -> float:
    """Bound for equal-trace positive matrices whose second argument has ``lambda_min = 1``.

    ``(1 + T) log(1 + T) - alpha log(1 + T/alpha)``.
    """
    if alpha < 0:
        raise DomainError(f"alpha must be non-negative, got {alpha}")
    _check_feasible(T, alpha, 1.0)
    T = max(T, 0.0)
    return _plus_term(T, 1.0) - _minus_term(T, alpha)


def bound_theorem(inp: BoundInput) -> float:
    """``(beta + T) log(1 + T/beta) - alpha log(1 + T/alpha)``; ``inf`` if ``beta = 0 < T``."""
    T = max(inp.T, 0.0)
    return _plus_term(T, inp.beta) - _minus_term(T, inp.alpha)


def bound_corollary1(T: float, beta: float) -> float:
    """Worst case of the theorem bound over all ``alpha`` compatible with ``(T, beta)``.

    The maximising ``alpha`` is ``max(0, beta - T)``, which gives two
    branches that meet continuously at ``T = beta``.
    """
    if T < 0:
        raise DomainError(f"T must be non-negative, got {T}")
    if not beta > 0:
        raise DomainError(f"beta must be positive, got {beta}")
    head = _plus_term(T, beta)
    if T <= beta:
        return head + _xlog_ratio(beta - T, beta)
    return head


def bound_corollary2(inp: BoundInput, cfg: RegularisationConfig) -> tuple[float, float]:
    """The pair ``(Q, Q2)`` bounding ``c_d S(rho + I || sigma + I)``.

    ``Q`` uses the minimal eigenvalues; ``Q2 = c_d T log(1 + T)`` is its
    maximum over them (attained at ``alpha = beta = 0``).
    """
    T = max(inp.T, 0.0)
    if T > 1 + FEASIBILITY_SLACK:
        raise DomainError(f"trace distance of density matrices is at most 1, got {T}")
    q = _plus_term(T, inp.beta + 1.0) - _minus_term(T, inp.alpha + 1.0)
    q2 = T * math.log1p(T)
    return cfg.c_d * q, cfg.c_d * q2


# -- vectorised forms used by the fuzzers -------------------------------------

def theorem_bound_array(T, alpha, beta):
    T = np.maximum(np.asarray(T, dtype=float), 0.0)
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        plus = np.where(beta > 0, (beta + T) * np.log1p(T / np.where(beta > 0, beta, 1.0)),
                        np.inf)
        plus = np.where(T == 0, 0.0, plus)
        live = alpha >= ALPHA_ZERO
        minus = np.where(live, alpha * np.log1p(T / np.where(live, alpha, 1.0)), 0.0)
    return plus - minus


def corollary1_bound_array(T, beta):
    T = np.maximum(np.asarray(T, dtype=float), 0.0)
    beta = np.asarray(beta, dtype=float)
    alpha_star = np.maximum(beta - T, 0.0)
    return theorem_bound_array(T, alpha_star, beta)


def corollary2_bound_array(T, alpha, beta, c_d):
    T = np.maximum(np.asarray(T, dtype=float), 0.0)
    q = theorem_bound_array(T, np.asarray(alpha) + 1.0, np.asarray(beta) + 1.0)
    return c_d * q, c_d * T * np.log1p(T)


# -- equality constructions -------------------------------------------------

def extremal_pair_proposition(T: float, alpha: float) -> tuple[HermitianMatrix, HermitianMatrix]:
    """``A = Diag(1 + T, alpha)``, ``B = Diag(1, T + alpha)``: equality in the proposition bound."""
    if alpha < 0:
        raise DomainError(f"alpha must be non-negative, got {alpha}")
    _check_feasible(T, alpha, 1.0)
    T = max(T, 0.0)
    return HermitianMatrix.diag([1.0 + T, alpha]), HermitianMatrix.diag([1.0, T + alpha])


def equality_states_theorem(inp: BoundInput, d: int) -> tuple[HermitianMatrix, HermitianMatrix]:
    """Density matrices of dimension ``d >= 3`` attaining the theorem bound.

    ``rho = Diag(beta + T, alpha, r, ..., r)`` and
    ``sigma = Diag(beta, alpha + T, r, ..., r)`` with the padding
    ``r = (1 - alpha - beta - T) / (d - 2)``, which must be at least
    ``max(alpha, beta)`` so the prescribed minima survive.
    """
    if d < 3:
        raise DomainError("equality needs dimension at least 3")
    T, alpha, beta = max(inp.T, 0.0), inp.alpha, inp.beta
    r = (1.0 - alpha - beta - T) / (d - 2)
    if r < max(alpha, beta) - FEASIBILITY_SLACK:
        raise InfeasibleError(
            f"padding r={r:.6g} would undercut max(alpha, beta)={max(alpha, beta):.6g} "
            f"in dimension {d}")
    pad = [r] * (d - 2)
    return (HermitianMatrix.diag([beta + T, alpha] + pad),
            HermitianMatrix.diag([beta, alpha + T] + pad))


def equality_states_corollary2(t: float) -> tuple[HermitianMatrix, HermitianMatrix]:
    """``Diag(1-t, t, 0)`` and ``Diag(1-t, 0, t)``: equality in ``R <= c_d T log(1+T)``."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t must lie in [0, 1], got {t}")
    return HermitianMatrix.diag([1.0 - t, t, 0.0]), HermitianMatrix.diag([1.0 - t, 0.0, t])
