"""Seeded random states for the fuzzing and verification routines.

Random numbers come from numpy's PCG64 bit generator.  Every draw is a pure
function of ``(seed, stream, index)``: the generator for sample ``index`` is
seeded with ``SeedSequence([seed, stream, index])``, where ``stream`` is a
fixed tag per sampler.  Batches are therefore independent of how they are
split across threads or calls.

Density matrices follow the Hilbert-Schmidt measure: draw a complex Ginibre
matrix ``G`` and normalise ``G G^H``.  Minimal-eigenvalue floors and
condition caps are enforced by mixing with the maximally mixed state rather
than by rejection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .hermitian import HermitianMatrix, eigh_stack, hermitize

__all__ = [
    "SamplerConfig",
    "sample_density_matrix",
    "sample_equal_trace_pd_pair",
    "sample_traceless_hermitian",
    "density_batch",
    "pd_pair_batch",
]

STREAM_DENSITY = 1
STREAM_PAIR = 2
STREAM_TRACELESS = 3
MAX_PAIR_ATTEMPTS = 100


@dataclass(frozen=True)
class SamplerConfig:
    """Parameters shared by all samplers.

    ``rank`` (default: full) sets the inner dimension of the Ginibre draw;
    a value below ``dim`` produces singular PSD matrices and requires a zero
    floor and infinite condition cap.
    """

    dim: int
    seed: int = 0
    min_eigenvalue_floor: float = 0.0
    condition_cap: float = math.inf
    rank: int | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.min_eigenvalue_floor < 0:
            raise ValueError("min_eigenvalue_floor must be non-negative")
        if not self.condition_cap > 1:
            raise ValueError("condition_cap must exceed 1")
        if self.rank is not None:
            if not 1 <= self.rank <= self.dim:
                raise ValueError(f"rank must lie in [1, {self.dim}]")
            if self.rank < self.dim and (self.min_eigenvalue_floor > 0
                                         or math.isfinite(self.condition_cap)):
                raise ValueError("rank-deficient draws cannot honour a floor or condition cap")

    @property
    def inner_rank(self):
        return self.dim if self.rank is None else self.rank


def _generator(seed, stream, index):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream, index])))


def _ginibre(rng, rows, cols):
    z = rng.standard_normal((rows, cols, 2))
    return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)


def _mixing_weight(lam_min, lam_max, level, floor, cap):
    """Smallest ``eps`` so ``(1-eps) W + eps level I`` meets the floor and cap."""
    eps = np.zeros_like(lam_min)
    if floor > 0:
        under = lam_min < floor
        need = np.where(under, floor - lam_min, 0.0) / np.where(under, level - lam_min, 1.0)
        eps = np.maximum(eps, need)
    if math.isfinite(cap):
        excess = lam_max - cap * lam_min
        over = excess > 0
        need = np.where(over, excess, 0.0) / np.where(over, excess + level * (cap - 1.0), 1.0)
        eps = np.maximum(eps, need)
    return np.clip(eps, 0.0, 1.0)


def _condition(stack, level, floor, cap):
    """Mix each matrix towards ``level * I`` (``level`` = trace / dim)."""
    if floor <= 0 and not math.isfinite(cap):
        return stack
    d = stack.shape[-1]
    lam, _ = eigh_stack(stack)
    eps = _mixing_weight(lam[:, 0], lam[:, -1], level, floor, cap)
    out = (1.0 - eps)[:, None, None] * stack + (eps * level)[:, None, None] * np.eye(d)
    return hermitize(out)


def _wishart(rng, d, k):
    g = _ginibre(rng, d, k)
    return g @ np.conj(g.T)


def density_batch(cfg: SamplerConfig, n: int, start: int = 0, stream: int = STREAM_DENSITY):
    """``n`` density matrices for sample indices ``start .. start + n - 1``."""
    d = cfg.dim
    if cfg.min_eigenvalue_floor * d > 1 + 1e-12:
        raise DomainError("min_eigenvalue_floor * dim must not exceed 1 for density matrices")
    out = np.empty((n, d, d), dtype=np.complex128)
    for i in range(n):
        w = _wishart(_generator(cfg.seed, stream, start + i), d, cfg.inner_rank)
        out[i] = w / np.real(np.trace(w))
    out = hermitize(out)
    if n == 0:
        return out
    return _condition(out, np.full(n, 1.0 / d), cfg.min_eigenvalue_floor, cfg.condition_cap)


def sample_density_matrix(cfg: SamplerConfig, index: int = 0) -> HermitianMatrix:
    """Hilbert-Schmidt density matrix with ``lambda_min >= cfg.min_eigenvalue_floor``."""
    return HermitianMatrix(density_batch(cfg, 1, index)[0])


def _pd_draw(rng, cfg):
    d = cfg.dim
    scale = d * rng.uniform(0.5, 2.0)
    w = _wishart(rng, d, cfg.inner_rank)
    w = hermitize(w * (scale / np.real(np.trace(w))))
    return _condition(w[None], np.array([scale / d]), cfg.min_eigenvalue_floor,
                      cfg.condition_cap)[0]


def pd_pair_batch(cfg: SamplerConfig, n: int, start: int = 0):
    """Stacks ``(A, B)`` of equal-trace positive matrices, shape ``(n, d, d)`` each.

    Traces are random in ``[d/2, 2d]`` so eigenvalues are of order one.  ``B``
    is drawn independently and rescaled to the trace of ``A``; if that
    rescaling pushes it under the floor it is redrawn.
    """
    d = cfg.dim
    floor = cfg.min_eigenvalue_floor
    if floor > 0.5:
        raise DomainError("min_eigenvalue_floor above 0.5 is incompatible with traces >= d/2")
    a_out = np.empty((n, d, d), dtype=np.complex128)
    b_out = np.empty((n, d, d), dtype=np.complex128)
    for i in range(n):
        rng = _generator(cfg.seed, STREAM_PAIR, start + i)
        a = _pd_draw(rng, cfg)
        tr_a = np.real(np.trace(a))
        for _ in range(MAX_PAIR_ATTEMPTS):
            b = _pd_draw(rng, cfg)
            b = hermitize(b * (tr_a / np.real(np.trace(b))))
            if floor <= 0 or eigh_stack(b)[0][0] >= floor:
                break
        else:
            raise DomainError(
                f"could not draw a pair meeting floor {floor} after {MAX_PAIR_ATTEMPTS} attempts")
        a_out[i] = a
        b_out[i] = b
    return a_out, b_out


def sample_equal_trace_pd_pair(cfg: SamplerConfig, index: int = 0) -> tuple[HermitianMatrix, HermitianMatrix]:
    a, b = pd_pair_batch(cfg, 1, index)
    return HermitianMatrix(a[0]), HermitianMatrix(b[0])


def sample_traceless_hermitian(cfg: SamplerConfig, norm: float, index: int = 0) -> HermitianMatrix:
    """Random traceless Hermitian matrix with trace norm ``norm``."""
    if not norm > 0:
        raise DomainError(f"norm must be positive, got {norm}")
    d = cfg.dim
    if d < 2:
        raise DomainError("a non-zero traceless matrix needs dimension at least 2")
    rng = _generator(cfg.seed, STREAM_TRACELESS, index)
    while True:
        h = hermitize(_ginibre(rng, d, d))
        h = h - (np.real(np.trace(h)) / d) * np.eye(d)
        lam, _ = eigh_stack(h)
        tn = float(np.sum(np.abs(lam)))
        if tn > 1e-8:
            break
    h = h * (norm / tn)
    h = h - (np.real(np.trace(h)) / d) * np.eye(d)
    return HermitianMatrix(h)
