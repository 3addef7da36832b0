"""Von Neumann entropy, relative entropy and their relatives.

Relative entropies are plain ``float`` values that may be ``math.inf``;
``inf`` is a legitimate answer (support condition violated), whereas
malformed inputs raise :class:`~entrobound.errors.DomainError`.
All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .hermitian import HermitianMatrix, trace_norm

__all__ = [
    "RegularisationConfig",
    "von_neumann_entropy",
    "relative_entropy",
    "relative_entropy_stack",
    "scaling_check",
    "regularised_relative_entropy",
    "trace_distance",
    "check_density",
]

PSD_TOL = 1e-10
TRACE_TOL = 1e-10
SUPPORT_TOL = 1e-12
KERNEL_EPS = 1e-14


@dataclass(frozen=True)
class RegularisationConfig:
    """Dimension and normalisation constant ``c_d`` of the regularised entropy.

    ``c_d`` defaults to ``1 / log 2``, which maps the largest possible value
    ``log 2`` of ``S(rho + I || sigma + I)`` to one.
    """

    dim: int
    c_d: float = 1.0 / math.log(2.0)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if not self.c_d > 0:
            raise ValueError(f"c_d must be positive, got {self.c_d}")


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, x * np.log(safe), 0.0)


def _checked_spectrum(m: HermitianMatrix, name: str):
    lam = m.eig.eigenvalues
    if lam[0] < -PSD_TOL:
        raise DomainError(
            f"{name} is not positive semidefinite (smallest eigenvalue {lam[0]!r})")
    return lam


def von_neumann_entropy(a: HermitianMatrix) -> float:
    """``-Tr A log A`` with ``0 log 0 = 0``."""
    lam = np.clip(_checked_spectrum(a, "A"), 0.0, None)
    return float(-np.sum(_xlogx(lam)))


def relative_entropy_stack(wa, va, wb, vb):
    """Relative entropies ``S(A_k || B_k)`` from precomputed eigensystems.

    ``wa``/``wb`` have shape ``(n, d)`` and ``va``/``vb`` shape ``(n, d, d)``.
    Eigenvalues of ``A`` below zero are clamped to zero.  The kernel of
    ``B`` is the span of eigenvectors with eigenvalue at most
    ``d * 1e-14 * lambda_max(B)``; if ``A`` puts weight above ``1e-12`` on it
    the entry is ``inf``.
    """
    wa = np.clip(np.asarray(wa, dtype=float), 0.0, None)
    wb = np.asarray(wb, dtype=float)
    d = wb.shape[-1]
    overlap = np.abs(np.conj(np.swapaxes(va, -1, -2)) @ vb) ** 2
    eps = d * KERNEL_EPS * np.max(wb, axis=-1, keepdims=True)
    ker = wb <= eps
    weight = np.einsum("...i,...ij,...j->...", wa, overlap, ker.astype(float))
    log_b = np.where(ker, 0.0, np.log(np.where(ker, 1.0, wb)))
    cross = np.einsum("...i,...ij,...j->...", wa, overlap, log_b)
    s = np.sum(_xlogx(wa), axis=-1) - cross
    return np.where(weight > SUPPORT_TOL, np.inf, s)


def relative_entropy(a: HermitianMatrix, b: HermitianMatrix) -> float:
    """``Tr A (log A - log B)``, or ``inf`` when ``supp A`` is not inside ``supp B``.

    Both arguments must be positive semidefinite (to ``1e-10``); they need
    not be normalised.
    """
    if a.dim != b.dim:
        raise DomainError(f"dimension mismatch: {a.dim} vs {b.dim}")
    _checked_spectrum(a, "A")
    _checked_spectrum(b, "B")
    ea, eb = a.eig, b.eig
    return float(relative_entropy_stack(ea.eigenvalues, ea.eigenvectors,
                                        eb.eigenvalues, eb.eigenvectors))


def scaling_check(a: HermitianMatrix, b: HermitianMatrix, factor: float) -> float:
    """``|S(aA || aB) - a S(A || B)|`` for a positive scalar ``a``."""
    if not factor > 0:
        raise DomainError(f"scaling factor must be positive, got {factor}")
    base = relative_entropy(a, b)
    scaled = relative_entropy(factor * a, factor * b)
    if math.isinf(base) or math.isinf(scaled):
        raise DomainError("scaling check needs a finite relative entropy")
    return abs(scaled - factor * base)


def check_density(m: HermitianMatrix, name: str = "state", tol: float = TRACE_TOL):
    """Raise unless ``m`` is PSD with unit trace."""
    _checked_spectrum(m, name)
    tr = m.trace()
    if abs(tr - 1.0) > tol:
        raise DomainError(f"{name} must have unit trace, got {tr!r}")


def regularised_relative_entropy(rho: HermitianMatrix, sigma: HermitianMatrix,
                                 cfg: RegularisationConfig | None = None) -> float:
    """``c_d S(rho + I || sigma + I)`` for density matrices; always finite."""
    if cfg is None:
        cfg = RegularisationConfig(rho.dim)
    if rho.dim != cfg.dim or sigma.dim != cfg.dim:
        raise DomainError(f"states must have dimension {cfg.dim}")
    check_density(rho, "rho")
    check_density(sigma, "sigma")
    return cfg.c_d * relative_entropy(rho + 1.0, sigma + 1.0)


def trace_distance(rho: HermitianMatrix, sigma: HermitianMatrix) -> float:
    """Half the trace norm of ``rho - sigma``."""
    if rho.dim != sigma.dim:
        raise DomainError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    return 0.5 * trace_norm(rho - sigma)
