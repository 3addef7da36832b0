"""Integral representations of log, its Fréchet derivative and relative entropy.

Two kinds of routines live here:

* quadrature evaluations of the resolvent integrals (``log_quadrature``,
  ``t_super_quadrature``).  They use only Cholesky factorisations and linear
  solves, never the Jacobi eigensolver, so they act as independent oracles
  for the spectral formulas;
* the closed-form Fréchet derivative of ``log`` (``t_super``), built from
  first divided differences in the eigenbasis, and the linear-path integral
  for the relative entropy.

Semi-infinite integrals over ``s`` in ``[0, inf)`` are mapped to ``[0, 1)``
with ``s = u / (1 - u)`` and integrated by Gauss-Legendre.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .hermitian import HermitianMatrix, eigh_stack, hermitize, matrix_function_stack, matrix_log

__all__ = [
    "QuadratureSpec",
    "LinearPath",
    "log_divided_difference",
    "t_super_stack",
    "log_quadrature",
    "t_super",
    "t_super_quadrature",
    "log_directional_derivative_check",
    "relative_entropy_path_integral",
]

DEFAULT_NODES = 200
DEGENERACY_RTOL = 1e-10
KERNEL_RTOL = 1e-12


@dataclass(frozen=True)
class QuadratureSpec:
    node_count: int = DEFAULT_NODES
    scheme: str = "gauss_legendre"

    def __post_init__(self):
        if self.node_count < 2:
            raise ValueError(f"node_count must be at least 2, got {self.node_count}")
        if self.scheme != "gauss_legendre":
            raise ValueError(f"unsupported quadrature scheme {self.scheme!r}")

    def unit_interval(self):
        """Nodes and weights on ``[0, 1]``."""
        return _gl_unit(self.node_count)


@lru_cache(maxsize=32)
def _gl_unit(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class LinearPath:
    """The segment ``C(s) = (1 - s) A + s B`` for ``s`` in ``[0, 1]``."""

    start: HermitianMatrix
    end: HermitianMatrix

    def __post_init__(self):
        if self.start.dim != self.end.dim:
            raise DomainError(f"path endpoints differ in dimension: "
                              f"{self.start.dim} vs {self.end.dim}")

    @property
    def dim(self):
        return self.start.dim

    def at(self, s):
        """Stack of ``C(s)`` for an array of parameters ``s``."""
        s = np.asarray(s, dtype=float)[..., None, None]
        return (1.0 - s) * self.start.entries + s * self.end.entries

    @property
    def velocity(self) -> HermitianMatrix:
        return self.end - self.start


def _require_pd(stack, what):
    """Cholesky-based positive-definiteness check on a stack."""
    try:
        np.linalg.cholesky(stack)
    except np.linalg.LinAlgError:
        raise DomainError(f"{what} is not positive definite") from None


def _resolvents(m, u):
    """Stack of ``(M (1 - u) + u)^-1`` over the nodes ``u``."""
    d = m.shape[-1]
    shifted = (1.0 - u)[:, None, None] * m + u[:, None, None] * np.eye(d)
    _require_pd(shifted, "resolvent argument M + s")
    return np.linalg.inv(shifted)


def log_quadrature(m: HermitianMatrix, q: QuadratureSpec = QuadratureSpec()) -> HermitianMatrix:
    """Matrix logarithm from ``log M = int_0^inf (1/(1+s) - (M+s)^-1) ds``.

    After ``s = u/(1-u)`` the integrand becomes ``(M(1-u) + u)^-1 (M - I)``,
    which is smooth on ``[0, 1]`` and free of cancellation.
    """
    _require_pd(m.entries, "matrix")
    u, w = q.unit_interval()
    r = _resolvents(m.entries, u)
    integrand = r @ (m.entries - np.eye(m.dim))
    return HermitianMatrix(hermitize(np.tensordot(w, integrand, axes=1)))


def t_super_quadrature(a: HermitianMatrix, delta: HermitianMatrix,
                       q: QuadratureSpec = QuadratureSpec()) -> HermitianMatrix:
    """``int_0^inf (A+s)^-1 Delta (A+s)^-1 ds`` by quadrature.

    Under ``s = u/(1-u)`` the Jacobian cancels against the two resolvent
    prefactors, leaving ``R(u) Delta R(u)`` with ``R(u) = (A(1-u) + u)^-1``.
    """
    if a.dim != delta.dim:
        raise DomainError(f"dimension mismatch: {a.dim} vs {delta.dim}")
    _require_pd(a.entries, "A")
    u, w = q.unit_interval()
    r = _resolvents(a.entries, u)
    integrand = r @ delta.entries @ r
    return HermitianMatrix(hermitize(np.tensordot(w, integrand, axes=1)))


def log_divided_difference(lam):
    """Matrix of first divided differences of ``log`` at the points ``lam``.

    Entries are ``(log x - log y) / (x - y)``, switching to the limit
    ``1 / x`` when ``|x - y| <= 1e-10 max(x, y)``.  Works on stacks
    ``(..., d)``; non-positive points give zero rows and columns.
    """
    lam = np.asarray(lam, dtype=float)
    x = lam[..., :, None]
    y = lam[..., None, :]
    pos = (x > 0.0) & (y > 0.0)
    xs = np.where(pos, x, 1.0)
    ys = np.where(pos, y, 1.0)
    diff = xs - ys
    close = np.abs(diff) <= DEGENERACY_RTOL * np.maximum(xs, ys)
    safe = np.where(close, 1.0, diff)
    with np.errstate(invalid="ignore", divide="ignore"):
        generic = np.log1p(safe / ys) / safe
    out = np.where(close, 1.0 / xs, generic)
    return np.where(pos, out, 0.0)


def t_super_stack(w, v, delta):
    """Closed-form ``T_A(Delta)`` given the eigensystem ``(w, v)`` of ``A``."""
    vh = np.conj(np.swapaxes(v, -1, -2))
    inner = vh @ delta @ v
    return hermitize(v @ (log_divided_difference(w) * inner) @ vh)


def t_super(a: HermitianMatrix, delta: HermitianMatrix) -> HermitianMatrix:
    """Fréchet derivative of ``log`` at ``A`` applied to ``Delta``.

    ``A`` may be singular provided ``ker A`` is contained in ``ker Delta``.
    """
    if a.dim != delta.dim:
        raise DomainError(f"dimension mismatch: {a.dim} vs {delta.dim}")
    e = a.eig
    lam = e.eigenvalues
    scale = max(float(np.max(np.abs(lam))), 1.0)
    if lam[0] < -KERNEL_RTOL * scale:
        raise DomainError(f"A must be positive semidefinite; smallest eigenvalue {lam[0]!r}")
    kernel = lam <= KERNEL_RTOL * scale
    if np.any(kernel):
        leak = np.linalg.norm(delta.entries @ e.eigenvectors[:, kernel])
        dscale = max(float(np.max(np.abs(delta.entries))), 1.0)
        if leak > 1e-10 * dscale:
            raise DomainError(
                f"ker A is not contained in ker Delta (leak {leak:.3e})")
        lam = np.where(kernel, 0.0, lam)
    return HermitianMatrix(t_super_stack(lam, e.eigenvectors, delta.entries))


def log_directional_derivative_check(a: HermitianMatrix, delta: HermitianMatrix, h: float) -> float:
    """Max relative entry deviation between a central difference of ``log`` and ``T_A``."""
    if h <= 0:
        raise DomainError("step h must be positive")
    plus = a + h * delta
    minus = a - h * delta
    for name, m in (("A + h Delta", plus), ("A - h Delta", minus)):
        if m.eig.eigenvalues[0] <= 0.0:
            raise DomainError(f"{name} is not positive definite")
    fd = (matrix_log(plus).entries - matrix_log(minus).entries) / (2.0 * h)
    exact = t_super(a, delta).entries
    scale = float(np.max(np.abs(exact)))
    if scale == 0.0:
        return float(np.max(np.abs(fd)))
    return float(np.max(np.abs(fd - exact)) / scale)


def relative_entropy_path_integral(path: LinearPath, q: QuadratureSpec = QuadratureSpec()) -> float:
    """Relative entropy ``S(A||B)`` by integrating along the straight segment.

    ``S = Tr(A-B) + Tr((B-A) log B) - int_0^1 Tr((B-A) log C(s)) ds``
    with ``C(s) = (1-s)A + sB``.  Both endpoints must be positive definite.
    """
    a, b = path.start, path.end
    _require_pd(a.entries, "path start")
    _require_pd(b.entries, "path end")
    u, w = q.unit_interval()
    cs = path.at(u)
    _require_pd(cs, "C(s) at a quadrature node")
    lam, vec = eigh_stack(cs)
    if np.any(lam[:, 0] <= 0.0):
        raise DomainError("C(s) at a quadrature node is not positive definite")
    logs = matrix_function_stack(lam, vec, np.log(lam))
    vel = path.velocity.entries
    # Tr(X Y) = sum_ij X_ij Y_ji
    inner = np.real(np.einsum("ij,nji->n", vel, logs))
    integral = float(np.dot(w, inner))
    log_b = matrix_log(b).entries
    head = float(np.real(np.trace(a.entries - b.entries)))
    head += float(np.real(np.einsum("ij,ji->", vel, log_b)))
    return head - integral
