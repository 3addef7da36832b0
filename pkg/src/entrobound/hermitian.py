"""Dense Hermitian matrices and their spectral toolkit.

Everything spectral goes through one eigensolver, the cyclic complex Jacobi
method in :mod:`entrobound._kernels`.  The ``*_stack`` helpers work on raw
arrays of shape ``(..., d, d)`` and are what the fuzzing code calls in bulk;
the :class:`HermitianMatrix` functions wrap them for single matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DomainError, MatrixFormatError

__all__ = [
    "HermitianMatrix",
    "EigenDecomposition",
    "JordanParts",
    "eigh",
    "eigh_stack",
    "matrix_function_stack",
    "matrix_log",
    "trace_norm",
    "operator_norm",
    "jordan_decompose",
    "min_eigenvalue",
    "is_psd",
    "load_matrix",
    "save_matrix",
    "matrix_to_json",
    "matrix_from_json",
]

TOL_HERM = 1e-12
SOFT_DIM_CAP = 256


def hermitize(a):
    """Return ``(a + a^H) / 2`` over the last two axes."""
    return 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))


def eigh_stack(a):
    """Eigendecomposition of a stack of Hermitian matrices.

    Parameters
    ----------
    a : array_like, shape (..., d, d)
        Hermitian matrices; only the Hermitian part is used.

    Returns
    -------
    w : ndarray, shape (..., d)
        Eigenvalues, ascending.
    v : ndarray, shape (..., d, d)
        Unitary matrices whose columns are the matching eigenvectors.

    Raises
    ------
    ConvergenceError
        If any matrix still has off-diagonal mass above tolerance after the
        sweep cap.
    """
    a = np.asarray(a)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected (..., d, d) array, got shape {a.shape}")
    lead = a.shape[:-2]
    d = a.shape[-1]
    work = np.ascontiguousarray(hermitize(a).reshape((-1, d, d)), dtype=np.complex128)
    if work.shape[0] == 0:
        return np.zeros(lead + (d,)), np.zeros(lead + (d, d), dtype=np.complex128)
    fro = np.sqrt(np.sum(np.abs(work) ** 2, axis=(1, 2)))
    w, v, sweeps, off = _kernels.jacobi(work)
    failed = off > _kernels.JACOBI_TOL * fro
    if np.any(failed):
        worst = float(np.max(off[failed]))
        raise ConvergenceError(
            f"Jacobi eigensolver did not converge in {_kernels.JACOBI_MAX_SWEEPS} "
            f"sweeps (off-diagonal residual {worst:.3e})", worst)
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w.reshape(lead + (d,)), v.reshape(lead + (d, d))


def matrix_function_stack(w, v, fw):
    """Assemble ``V diag(fw) V^H`` for stacked spectra; result Hermitized."""
    out = np.einsum("...ij,...j,...kj->...ik", v, fw, np.conj(v))
    return hermitize(out)


class HermitianMatrix:
    """Immutable dense complex Hermitian matrix.

    Construction symmetrises the input as ``(M + M^H) / 2`` after checking
    that the anti-Hermitian part is no larger than ``1e-12`` times the
    largest entry.  The eigendecomposition is computed lazily and cached.
    """

    __array_priority__ = 1000

    def __init__(self, entries, *, tol=TOL_HERM):
        m = np.array(entries, dtype=np.complex128)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DomainError(f"expected a non-empty square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise DomainError("matrix entries must be finite")
        scale = float(np.max(np.abs(m)))
        skew = float(np.max(np.abs(m - np.conj(m.T))))
        if skew > tol * scale:
            raise DomainError(
                f"matrix is not Hermitian: anti-Hermitian part {skew:.3e} exceeds "
                f"{tol:.0e} x max entry {scale:.3e}")
        m = hermitize(m)
        m.setflags(write=False)
        self._m = m

    @classmethod
    def diag(cls, values):
        return cls(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim))

    @classmethod
    def zeros(cls, dim):
        return cls(np.zeros((dim, dim)))

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """Read-only ``(dim, dim)`` complex array."""
        return self._m

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._m.copy() if copy else self._m
        return self._m.astype(dtype)

    @cached_property
    def eig(self) -> EigenDecomposition:
        return eigh(self)

    def trace(self) -> float:
        return float(np.trace(self._m).real)

    def _coerce(self, other):
        if isinstance(other, HermitianMatrix):
            if other.dim != self.dim:
                raise DomainError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other._m
        if np.isscalar(other) and np.isreal(other):
            return float(other) * np.eye(self.dim)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else HermitianMatrix(self._m + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else HermitianMatrix(self._m - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else HermitianMatrix(o - self._m)

    def __neg__(self):
        return HermitianMatrix(-self._m)

    def __mul__(self, a):
        if np.isscalar(a) and np.isreal(a):
            return HermitianMatrix(float(a) * self._m)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, a):
        if np.isscalar(a) and np.isreal(a):
            return HermitianMatrix(self._m / float(a))
        return NotImplemented

    def allclose(self, other, atol=1e-12):
        return bool(np.max(np.abs(self._m - np.asarray(other))) <= atol)

    def __repr__(self):
        body = np.array2string(self._m, precision=6, suppress_small=True)
        return f"HermitianMatrix(dim={self.dim},\n{body})"


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues and unitary eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return matrix_function_stack(self.eigenvalues, self.eigenvectors, self.eigenvalues)

    def apply(self, fw) -> HermitianMatrix:
        return HermitianMatrix(matrix_function_stack(self.eigenvalues, self.eigenvectors, fw))


@dataclass(frozen=True)
class JordanParts:
    """Positive and negative parts with ``plus - minus`` the decomposed matrix."""

    plus: HermitianMatrix
    minus: HermitianMatrix


def eigh(m: HermitianMatrix) -> EigenDecomposition:
    w, v = eigh_stack(m.entries)
    w.setflags(write=False)
    v.setflags(write=False)
    return EigenDecomposition(w, v)


def matrix_log(m: HermitianMatrix) -> HermitianMatrix:
    """Natural logarithm of a positive definite matrix."""
    e = m.eig
    lam_min = float(e.eigenvalues[0])
    if lam_min <= 0.0:
        raise DomainError(
            f"matrix logarithm needs a positive definite argument; "
            f"smallest eigenvalue is {lam_min!r}")
    return e.apply(np.log(e.eigenvalues))


def trace_norm(m: HermitianMatrix) -> float:
    return float(np.sum(np.abs(m.eig.eigenvalues)))


def operator_norm(m: HermitianMatrix) -> float:
    return float(np.max(np.abs(m.eig.eigenvalues)))


def jordan_decompose(delta: HermitianMatrix) -> JordanParts:
    """Split ``delta`` into mutually orthogonal PSD parts, ``delta = plus - minus``."""
    e = delta.eig
    lam = e.eigenvalues
    return JordanParts(e.apply(np.maximum(lam, 0.0)), e.apply(np.maximum(-lam, 0.0)))


def min_eigenvalue(m: HermitianMatrix) -> float:
    return float(m.eig.eigenvalues[0])


def is_psd(m: HermitianMatrix, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return min_eigenvalue(m) >= -tol


# -- matrix files -----------------------------------------------------------

def matrix_to_json(m: HermitianMatrix) -> dict:
    entries = [[[float(z.real), float(z.imag)] for z in row] for row in m.entries]
    return {"dim": m.dim, "entries": entries}


def matrix_from_json(doc) -> HermitianMatrix:
    if not isinstance(doc, dict) or "dim" not in doc or "entries" not in doc:
        raise MatrixFormatError('expected an object with "dim" and "entries"')
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise MatrixFormatError(f'"dim" must be a positive integer, got {dim!r}')
    if dim > SOFT_DIM_CAP:
        raise MatrixFormatError(f"dimension {dim} exceeds the supported cap {SOFT_DIM_CAP}")
    rows = doc["entries"]
    if not isinstance(rows, list) or len(rows) != dim:
        raise MatrixFormatError(f'"entries" must hold {dim} rows')
    out = np.empty((dim, dim), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise MatrixFormatError(f"row {i} must hold {dim} entries")
        for j, z in enumerate(row):
            if (not isinstance(z, list) or len(z) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                               for x in z)):
                raise MatrixFormatError(f"entry ({i}, {j}) must be a [re, im] pair of numbers")
            out[i, j] = complex(z[0], z[1])
    try:
        return HermitianMatrix(out)
    except DomainError as exc:
        raise MatrixFormatError(str(exc)) from exc


def load_matrix(path) -> HermitianMatrix:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: invalid JSON ({exc})") from exc
    return matrix_from_json(doc)


def save_matrix(m: HermitianMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_json(m), fh)
        fh.write("\n")
