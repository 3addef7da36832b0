import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from entrobound import _accel
from entrobound._kernels import jacobi, jacobi_numba, jacobi_numpy

from conftest import random_hermitian

needs_numba = pytest.mark.skipif(jacobi_numba is None, reason="numba not installed")


def _check_decomposition(a, w, v, tol=1e-10):
    for k in range(a.shape[0]):
        rebuilt = (v[k] * w[k]) @ v[k].conj().T
        assert np.max(np.abs(rebuilt - a[k])) <= tol * max(1.0, np.max(np.abs(a[k])))
        assert np.max(np.abs(v[k].conj().T @ v[k] - np.eye(a.shape[-1]))) <= 1e-12


@pytest.mark.parametrize("d", [1, 2, 3, 6, 17])
def test_numpy_kernel_matches_lapack(rng, d):
    a = np.stack([random_hermitian(rng, d) for _ in range(8)])
    w, v, sweeps, off = jacobi_numpy(a.copy())
    _check_decomposition(a, w, v)
    assert np.allclose(np.sort(w, axis=-1), np.linalg.eigvalsh(a), atol=1e-12)
    assert np.all(sweeps <= 100)


@needs_numba
@pytest.mark.parametrize("d", [1, 2, 4, 9])
def test_backends_agree(rng, d):
    a = np.stack([random_hermitian(rng, d) for _ in range(16)])
    w1, v1, _, _ = jacobi_numpy(a.copy())
    w2, v2, _, _ = jacobi_numba(a.copy())
    _check_decomposition(a, w2, v2)
    assert np.allclose(np.sort(w1, axis=-1), np.sort(w2, axis=-1), atol=1e-12)


def test_dispatch_follows_backend(rng):
    a = random_hermitian(rng, 4)[None]
    w, v, _, _ = jacobi(a.copy())
    _check_decomposition(a, w, v)
    assert _accel.BACKEND in ("numba", "numpy")


def test_already_diagonal_needs_no_sweeps():
    a = np.diag([3.0, 1.0, 2.0]).astype(complex)[None]
    w, v, sweeps, off = jacobi_numpy(a)
    assert sweeps[0] == 0 and off[0] == 0
    assert np.array_equal(w[0], [3.0, 1.0, 2.0])


@given(st.integers(1, 7), st.integers(0, 2**32 - 1), st.floats(1e-6, 1e6))
def test_scale_invariant_accuracy(d, seed, scale):
    a = random_hermitian(np.random.default_rng(seed), d, scale)[None]
    w, v, _, _ = jacobi(a.copy())
    _check_decomposition(a, w, v)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, ENTROBOUND_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", "import entrobound; print(entrobound.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


@pytest.mark.parametrize("value", ["0", "-2", "many"])
def test_bad_thread_count_rejected(monkeypatch, value):
    monkeypatch.setenv("ENTROBOUND_THREADS", value)
    with pytest.raises(ValueError):
        _accel.thread_count()


def test_thread_count_absent(monkeypatch):
    monkeypatch.delenv("ENTROBOUND_THREADS", raising=False)
    assert _accel.thread_count() is None
