"""Empirical sharpness of the relative-entropy bounds.

``fuzz_slack`` measures ``bound - entropy`` over random state pairs; a
negative slack beyond round-off would falsify a bound.  The search side
(``maximize_entropy_at_constraints``) pushes the relative entropy of a
diagonal pair as high as it goes under fixed ``(T, alpha, beta)`` and
compares with the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import bounds as _bounds
from .bounds import BoundInput, bound_theorem, equality_states_theorem
from .entropy import RegularisationConfig, relative_entropy_stack
from .errors import DomainError, InfeasibleError
from .hermitian import HermitianMatrix, eigh_stack
from .sampling import SamplerConfig, density_batch, pd_pair_batch

__all__ = [
    "BOUND_SELECTORS",
    "SlackRecord",
    "FuzzOutcome",
    "DiagonalFamily",
    "SharpnessRow",
    "fuzz_slack",
    "bin_min_slack",
    "maximize_entropy_at_constraints",
    "constraint_residuals",
    "sharpness_report",
]

BOUND_SELECTORS = ("prop", "theorem", "cor1", "cor2", "cor2-simple")
VIOLATION_TOL = 1e-9
PENALTY = 1e6
BIN_WIDTH = 0.05


@dataclass(frozen=True)
class SlackRecord:
    T: float
    alpha: float
    beta: float
    entropy: float
    bound: float
    slack: float


@dataclass
class FuzzOutcome:
    """Records sorted by slack, plus how many samples were skipped.

    A sample is skipped when the selected bound does not apply to it
    (second state singular for the unshifted bounds).
    """

    records: list = field(default_factory=list)
    skipped: int = 0

    @property
    def min_slack(self):
        return self.records[0].slack if self.records else math.nan

    @property
    def violations(self):
        return sum(1 for r in self.records if r.slack < -VIOLATION_TOL)


def _measure(a, b):
    """Eigensystems of both stacks, ``T``, ``alpha`` and ``beta``."""
    wa, va = eigh_stack(a)
    wb, vb = eigh_stack(b)
    wd, _ = eigh_stack(a - b)
    T = 0.5 * np.sum(np.abs(wd), axis=-1)
    return wa, va, wb, vb, T, wa[:, 0], wb[:, 0]


def fuzz_slack(cfg: SamplerConfig, samples: int, which: str = "theorem", *,
               c_d: float | None = None, extra_pairs=()) -> FuzzOutcome:
    """Measure bound slack over ``samples`` random pairs.

    ``which`` selects the bound: ``prop`` (equal-trace positive matrices
    rescaled so the second has smallest eigenvalue 1), ``theorem``,
    ``cor1``, ``cor2`` (regularised entropy against ``Q``) or
    ``cor2-simple`` (against ``c_d T log(1+T)``).  ``extra_pairs`` are
    appended to the random stream unchanged.
    """
    if which not in BOUND_SELECTORS:
        raise ValueError(f"which must be one of {BOUND_SELECTORS}, got {which!r}")
    if samples < 0:
        raise ValueError("samples must be non-negative")
    d = cfg.dim
    if which == "prop":
        a, b = pd_pair_batch(cfg, samples)
    else:
        both = density_batch(cfg, 2 * samples)
        a, b = both[0::2], both[1::2]
    extra = list(extra_pairs)
    if extra:
        a = np.concatenate([a, np.stack([np.asarray(p[0]) for p in extra])])
        b = np.concatenate([b, np.stack([np.asarray(p[1]) for p in extra])])
    out = FuzzOutcome()
    if a.shape[0] == 0:
        return out
    if which == "prop":
        beta0 = eigh_stack(b)[0][:, 0]
        ok = beta0 > 0
        out.skipped += int(np.sum(~ok))
        a, b = a[ok] / beta0[ok, None, None], b[ok] / beta0[ok, None, None]
    wa, va, wb, vb, T, alpha, beta = _measure(a, b)
    alpha = np.maximum(alpha, 0.0)
    kernel_eps = d * 1e-14 * wb[:, -1]
    if which == "cor2":
        cd = RegularisationConfig(d).c_d if c_d is None else c_d
        entropy = cd * relative_entropy_stack(wa + 1.0, va, wb + 1.0, vb)
        bound, _ = _bounds.corollary2_bound_array(T, alpha, np.maximum(beta, 0.0), cd)
        usable = np.ones_like(T, dtype=bool)
    elif which == "cor2-simple":
        cd = RegularisationConfig(d).c_d if c_d is None else c_d
        entropy = cd * relative_entropy_stack(wa + 1.0, va, wb + 1.0, vb)
        _, bound = _bounds.corollary2_bound_array(T, alpha, np.maximum(beta, 0.0), cd)
        usable = np.ones_like(T, dtype=bool)
    else:
        entropy = relative_entropy_stack(wa, va, wb, vb)
        usable = beta > kernel_eps
        safe_beta = np.where(usable, beta, 1.0)
        if which == "cor1":
            bound = _bounds.corollary1_bound_array(T, safe_beta)
        elif which == "prop":
            bound = _bounds.theorem_bound_array(T, alpha, np.ones_like(T))
        else:
            bound = _bounds.theorem_bound_array(T, alpha, safe_beta)
    feasible = T >= np.abs(alpha - beta) - _bounds.FEASIBILITY_SLACK
    keep = usable & feasible
    out.skipped += int(np.sum(~keep))
    slack = bound - entropy
    rows = [SlackRecord(float(t), float(al), float(be), float(s), float(bd), float(sl))
            for t, al, be, s, bd, sl in zip(T[keep], alpha[keep], beta[keep],
                                            entropy[keep], bound[keep], slack[keep])]
    rows.sort(key=lambda r: r.slack)
    out.records = rows
    return out


def bin_min_slack(records, width: float = BIN_WIDTH):
    """Smallest slack per ``(T, beta)`` cell of side ``width`` on ``[0, 1]^2``."""
    nbins = int(round(1.0 / width))
    cells = {}
    for r in records:
        key = (min(int(r.T / width), nbins - 1), min(int(r.beta / width), nbins - 1))
        if key not in cells or r.slack < cells[key]:
            cells[key] = r.slack
    return cells


# -- diagonal search --------------------------------------------------------

def _classical_re(p, q):
    pos = p > 0
    if np.any(pos & (q <= 0)):
        return math.inf
    return float(np.sum(p[pos] * np.log(p[pos] / q[pos])))


@dataclass(frozen=True)
class DiagonalFamily:
    """A commuting pair ``rho = Diag(rho_diag)``, ``sigma = Diag(sigma_diag)``."""

    dim: int
    rho_diag: np.ndarray
    sigma_diag: np.ndarray

    def __post_init__(self):
        for name in ("rho_diag", "sigma_diag"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (self.dim,):
                raise DomainError(f"{name} must have length {self.dim}")
            if np.any(v < 0) or abs(v.sum() - 1.0) > 1e-12:
                raise DomainError(f"{name} must be a probability vector")
            object.__setattr__(self, name, v)

    @property
    def T(self):
        return 0.5 * float(np.sum(np.abs(self.rho_diag - self.sigma_diag)))

    @property
    def alpha(self):
        return float(self.rho_diag.min())

    @property
    def beta(self):
        return float(self.sigma_diag.min())

    def relative_entropy(self):
        return _classical_re(self.rho_diag, self.sigma_diag)

    def states(self):
        return HermitianMatrix.diag(self.rho_diag), HermitianMatrix.diag(self.sigma_diag)


def constraint_residuals(family: DiagonalFamily, target: BoundInput):
    """Signed deviations ``(T, alpha, beta)`` of ``family`` from ``target``."""
    return (family.T - target.T, family.alpha - target.alpha, family.beta - target.beta)


def _decode(x, d, alpha, beta):
    y, z = x[:d] ** 2, x[d:] ** 2
    sy, sz = y.sum(), z.sum()
    if sy == 0 or sz == 0:
        return None
    return alpha + (1 - d * alpha) * y / sy, beta + (1 - d * beta) * z / sz


def _polish(rho, sigma, target, act_tol):
    """Project onto the affine set cut out by the constraints active at ``act_tol``.

    Relative entropy is jointly convex, so its maximum over the feasible
    polytope sits at a vertex; when enough constraints are active the
    projection lands on that vertex exactly.
    """
    d = rho.size
    T, alpha, beta = target.T, target.alpha, target.beta
    x = np.concatenate([rho, sigma])
    for _ in range(5):
        r, s = x[:d], x[d:]
        delta = r - s
        rows, rhs = [], []

        def add(coef_r, coef_s, value):
            rows.append(np.concatenate([coef_r, coef_s]))
            rhs.append(value)

        ones, zero = np.ones(d), np.zeros(d)
        add(ones, zero, 1.0)
        add(zero, ones, 1.0)
        flat = np.abs(delta) < act_tol
        sign = np.where(flat, 0.0, np.sign(delta))
        add(0.5 * sign, -0.5 * sign, T)
        for j in range(d):
            e = np.eye(d)[j]
            if r[j] - alpha < act_tol or j == np.argmin(r):
                add(e, zero, alpha)
            if s[j] - beta < act_tol or j == np.argmin(s):
                add(zero, e, beta)
            if flat[j]:
                add(e, -e, 0.0)
        J = np.array(rows)
        x = x + np.linalg.lstsq(J, np.array(rhs) - J @ x, rcond=None)[0]
    r, s = np.clip(x[:d], 0.0, None), np.clip(x[d:], 0.0, None)
    if abs(r.sum() - 1) > 1e-13 or abs(s.sum() - 1) > 1e-13:
        return None
    try:
        fam = DiagonalFamily(d, r, s)
    except DomainError:
        return None
    if max(abs(v) for v in constraint_residuals(fam, target)) > 1e-12:
        return None
    return fam


def maximize_entropy_at_constraints(target: BoundInput, d: int, restarts: int = 10, *,
                                    seed: int = 0, tol: float = 1e-10,
                                    max_iter: int = 10_000, start=None):
    """Largest ``S(rho||sigma)`` found over diagonal pairs meeting ``target``.

    Parameterisation: ``rho = alpha + (1 - d alpha) y^2 / |y|^2`` and
    likewise for ``sigma``, so traces are exact and minima never undercut
    ``alpha``/``beta``.  Hitting the minima and the trace distance is
    enforced by a quadratic penalty of weight ``1e6``; each Nelder-Mead run
    (adaptive simplex, ``tol`` on both ``x`` and ``f``) is then polished onto
    the exactly feasible set.  Returns ``(family, entropy)``; use
    :func:`constraint_residuals` to inspect the constraint fit.
    """
    if d < 3:
        raise DomainError("the diagonal search needs d >= 3")
    if d > 16:
        raise DomainError("the diagonal search is limited to d <= 16")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    T, alpha, beta = target.T, target.alpha, target.beta
    if not beta > 0:
        raise DomainError("beta must be positive for a finite bound")
    if alpha * d > 1 + 1e-12 or beta * d > 1 + 1e-12:
        raise InfeasibleError(f"alpha and beta must not exceed 1/{d}")

    def objective(x):
        dec = _decode(x, d, alpha, beta)
        if dec is None:
            return 1e30
        r, s = dec
        res = ((r.min() - alpha) ** 2 + (s.min() - beta) ** 2
               + (0.5 * np.abs(r - s).sum() - T) ** 2)
        return -_classical_re(r, s) + PENALTY * res

    rng = np.random.default_rng(seed)
    best = None
    best_s = -math.inf
    starts = []
    if start is not None:
        starts.append(np.concatenate([np.sqrt(np.clip(np.asarray(start[0]) - alpha, 0, None)),
                                      np.sqrt(np.clip(np.asarray(start[1]) - beta, 0, None))]))
    while len(starts) < restarts:
        starts.append(rng.standard_normal(2 * d))
    for x0 in starts[:restarts]:
        res = minimize(objective, x0, method="Nelder-Mead",
                       options={"xatol": tol, "fatol": tol, "maxiter": max_iter,
                                "maxfev": 2 * max_iter, "adaptive": True})
        dec = _decode(res.x, d, alpha, beta)
        if dec is None:
            continue
        for act_tol in (1e-3, 1e-4, 1e-5, 1e-6, 1e-8):
            fam = _polish(dec[0], dec[1], target, act_tol)
            if fam is None:
                continue
            s = fam.relative_entropy()
            if s > best_s:
                best, best_s = fam, s
    if best is None:
        raise DomainError(f"no feasible diagonal pair found for {target}")
    return best, best_s


@dataclass(frozen=True)
class SharpnessRow:
    T: float
    alpha: float
    beta: float
    bound: float
    entropy: float
    relative_gap: float
    source: str
    attained: bool


def sharpness_report(grid, d: int, *, restarts: int = 10, seed: int = 0,
                     search: str = "auto", flag_gap: float = 1e-4):
    """Bound versus best entropy found, one row per grid point.

    Candidates are the explicit equality states (when their padding is
    feasible in dimension ``d``) and the diagonal search.  With
    ``search="auto"`` the search only runs when the explicit states are
    unavailable or miss the bound; ``"always"`` runs it everywhere.
    Rows whose relative gap exceeds ``flag_gap`` are marked not attained.
    """
    if search not in ("auto", "always", "never"):
        raise ValueError("search must be 'auto', 'always' or 'never'")
    rows = []
    for i, point in enumerate(grid):
        bound = bound_theorem(point)
        cands = []
        start = None
        try:
            rho, sigma = equality_states_theorem(point, d)
            rd = np.real(np.diag(rho.entries))
            sd = np.real(np.diag(sigma.entries))
            fam = DiagonalFamily(d, rd, sd)
            cands.append((fam.relative_entropy(), "constructor"))
            start = (rd, sd)
        except (InfeasibleError, DomainError):
            pass
        need_search = search == "always" or (
            search == "auto" and (not cands or abs(bound - cands[0][0]) > 1e-10 * max(1.0, bound)))
        if need_search and point.T > 0:
            _, s = maximize_entropy_at_constraints(point, d, restarts, seed=seed + i, start=start)
            cands.append((s, "search"))
        elif need_search:
            cands.append((0.0, "search"))
        if not cands:
            rows.append(SharpnessRow(point.T, point.alpha, point.beta, bound, math.nan,
                                     math.nan, "none", False))
            continue
        s, src = max(cands, key=lambda c: c[0])
        gap = (bound - s) / bound if bound > 0 else abs(bound - s)
        rows.append(SharpnessRow(point.T, point.alpha, point.beta, bound, s, gap, src,
                                 gap <= flag_gap))
    return rows
