"""Cyclic Jacobi eigensolver for stacks of complex Hermitian matrices.

Two implementations share one contract::

    w, v, sweeps, off = kernel(a, tol, max_sweeps)

``a`` has shape ``(n, d, d)`` and is overwritten.  ``w`` holds the
(unsorted) eigenvalues, ``v`` the eigenvectors as columns, ``sweeps`` the
number of sweeps used per matrix and ``off`` the final off-diagonal
Frobenius mass.  A matrix counts as converged once
``off <= tol * ||a||_F``; ``sweeps == max_sweeps`` with ``off`` above that
threshold means it did not.

Each rotation acts on the (p, q) plane with the unitary

    U = [[c, s], [-s * conj(ph), c * conj(ph)]]

where ``ph = a_pq / |a_pq|``; the phase factor makes the pivot block real and
the real rotation ``(c, s)`` is the textbook small-angle Jacobi rotation.
"""

import math

import numpy as np

from ._accel import BACKEND, HAVE_NUMBA, numba_jit

__all__ = ["jacobi_numpy", "jacobi_numba", "jacobi"]

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100


def _rotation_numpy(apq, app, aqq):
    r = np.abs(apq)
    active = r > 0.0
    safe_r = np.where(active, r, 1.0)
    ph = np.where(active, apq / safe_r, 1.0 + 0.0j)
    theta = (aqq - app) / (2.0 * safe_r)
    big = np.abs(theta) > 1e150
    with np.errstate(over="ignore"):
        t = 1.0 / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
    t = np.where(big, 0.5 / np.where(big, np.abs(theta), 1.0), t)
    t = np.where(theta < 0.0, -t, t)
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(t * t + 1.0)
    return c, t * c, ph


def jacobi_numpy(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Vectorised-over-batch Jacobi sweeps in plain numpy."""
    n, d, _ = a.shape
    v = np.zeros((n, d, d), dtype=np.complex128)
    v[:, np.arange(d), np.arange(d)] = 1.0
    fro = np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))
    offmask = ~np.eye(d, dtype=bool)
    sweeps = np.full(n, max_sweeps, dtype=np.int64)
    off = np.zeros(n)
    live = np.arange(n)
    for sweep in range(max_sweeps + 1):
        sub = a[live]
        off_live = np.sqrt(np.sum(np.abs(sub[:, offmask]) ** 2, axis=1))
        off[live] = off_live
        done = off_live <= tol * fro[live]
        sweeps[live[done]] = sweep
        live = live[~done]
        if live.size == 0 or sweep == max_sweeps:
            break
        m = a[live]
        u = v[live]
        for p in range(d - 1):
            for q in range(p + 1, d):
                c, s, ph = _rotation_numpy(
                    m[:, p, q], m[:, p, p].real, m[:, q, q].real)
                cph = np.conj(ph)
                c2 = c[:, None]
                s2 = s[:, None]
                colp = m[:, :, p].copy()
                colq = m[:, :, q]
                m[:, :, p] = c2 * colp - (s * cph)[:, None] * colq
                m[:, :, q] = s2 * colp + (c * cph)[:, None] * colq
                rowp = m[:, p, :].copy()
                rowq = m[:, q, :]
                m[:, p, :] = c2 * rowp - (s * ph)[:, None] * rowq
                m[:, q, :] = s2 * rowp + (c * ph)[:, None] * rowq
                m[:, p, q] = 0.0
                m[:, q, p] = 0.0
                m[:, p, p] = m[:, p, p].real
                m[:, q, q] = m[:, q, q].real
                vp = u[:, :, p].copy()
                vq = u[:, :, q]
                u[:, :, p] = c2 * vp - (s * cph)[:, None] * vq
                u[:, :, q] = s2 * vp + (c * cph)[:, None] * vq
        a[live] = m
        v[live] = u
    w = np.real(np.diagonal(a, axis1=1, axis2=2)).copy()
    return w, v, sweeps, off


@numba_jit
def _offdiag_mass(m):
    d = m.shape[0]
    acc = 0.0
    for i in range(d):
        for j in range(d):
            if i != j:
                acc += m[i, j].real ** 2 + m[i, j].imag ** 2
    return math.sqrt(acc)


@numba_jit
def _jacobi_one(m, v, tol, max_sweeps):
    d = m.shape[0]
    for i in range(d):
        for j in range(d):
            v[i, j] = 1.0 if i == j else 0.0
    fro = 0.0
    for i in range(d):
        for j in range(d):
            fro += m[i, j].real ** 2 + m[i, j].imag ** 2
    fro = math.sqrt(fro)
    off = _offdiag_mass(m)
    for sweep in range(max_sweeps + 1):
        off = _offdiag_mass(m)
        if off <= tol * fro:
            return sweep, off
        if sweep == max_sweeps:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = m[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                ph = apq / r
                theta = (m[q, q].real - m[p, p].real) / (2.0 * r)
                if abs(theta) > 1e150:
                    t = 0.5 / abs(theta)
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                cph = ph.conjugate()
                for k in range(d):
                    akp = m[k, p]
                    akq = m[k, q]
                    m[k, p] = c * akp - s * cph * akq
                    m[k, q] = s * akp + c * cph * akq
                for k in range(d):
                    apk = m[p, k]
                    aqk = m[q, k]
                    m[p, k] = c * apk - s * ph * aqk
                    m[q, k] = s * apk + c * ph * aqk
                m[p, q] = 0.0
                m[q, p] = 0.0
                m[p, p] = m[p, p].real
                m[q, q] = m[q, q].real
                for k in range(d):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * cph * vkq
                    v[k, q] = s * vkp + c * cph * vkq
    return max_sweeps, off


if HAVE_NUMBA:
    import numba

    @numba.njit(parallel=True, cache=True)
    def _jacobi_batch_numba(a, tol, max_sweeps):
        n, d, _ = a.shape
        w = np.empty((n, d))
        v = np.empty((n, d, d), dtype=np.complex128)
        sweeps = np.empty(n, dtype=np.int64)
        off = np.empty(n)
        for b in numba.prange(n):
            sw, of = _jacobi_one(a[b], v[b], tol, max_sweeps)
            sweeps[b] = sw
            off[b] = of
            for i in range(d):
                w[b, i] = a[b, i, i].real
        return w, v, sweeps, off

    def jacobi_numba(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
        """Compiled Jacobi sweeps, one matrix per parallel iteration."""
        return _jacobi_batch_numba(a, tol, max_sweeps)
else:  # pragma: no cover
    jacobi_numba = None


def jacobi(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Dispatch to the backend chosen by ``ENTROBOUND_BACKEND``."""
    if BACKEND == "numba":
        return jacobi_numba(a, tol, max_sweeps)
    return jacobi_numpy(a, tol, max_sweeps)
