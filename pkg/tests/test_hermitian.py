import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from entrobound import (DomainError, HermitianMatrix, MatrixFormatError, eigh, is_psd,
                        jordan_decompose, load_matrix, matrix_log, min_eigenvalue,
                        operator_norm, save_matrix, trace_norm)
from entrobound.bounds import equality_states_corollary2
from entrobound.hermitian import matrix_from_json, matrix_to_json
from entrobound.integrals import QuadratureSpec, log_quadrature
from entrobound.sampling import SamplerConfig, sample_traceless_hermitian

from conftest import random_hermitian, random_pd

D = HermitianMatrix.diag


class TestConstruction:
    def test_rejects_non_hermitian(self):
        with pytest.raises(DomainError, match="not Hermitian"):
            HermitianMatrix([[1.0, 2.0], [0.0, 1.0]])

    def test_symmetrises_roundoff(self):
        m = HermitianMatrix([[1.0, 1.0 + 1e-15], [1.0, 2.0]])
        assert np.array_equal(m.entries, m.entries.conj().T)

    @pytest.mark.parametrize("bad", [[[1.0, 2.0]], [], [[math.nan]], [[math.inf]]])
    def test_rejects_bad_shapes_and_values(self, bad):
        with pytest.raises(DomainError):
            HermitianMatrix(bad)

    def test_entries_read_only(self):
        m = HermitianMatrix.identity(2)
        with pytest.raises(ValueError):
            m.entries[0, 0] = 5.0

    def test_scalar_arithmetic_means_identity(self):
        m = D([1.0, 2.0])
        assert (m + 1).allclose(D([2.0, 3.0]))
        assert (3 - m).allclose(D([2.0, 1.0]))
        assert (2 * m / 4).allclose(D([0.5, 1.0]))
        assert (-m).allclose(D([-1.0, -2.0]))


class TestEigh:
    def test_diagonal(self):
        e = eigh(D([3.0, 1.0, 2.0]))
        assert np.allclose(e.eigenvalues, [1, 2, 3])
        p = np.abs(e.eigenvectors)
        assert np.allclose(p.sum(axis=0), 1) and np.allclose(p.sum(axis=1), 1)
        assert set(np.round(p.ravel(), 12)) <= {0.0, 1.0}

    def test_pauli_x(self):
        assert np.allclose(eigh(HermitianMatrix([[0, 1], [1, 0]])).eigenvalues, [-1, 1])

    def test_random_reconstruction(self, rng):
        m = HermitianMatrix(random_hermitian(rng, 6))
        e = eigh(m)
        assert np.max(np.abs(e.reconstruct() - m.entries)) <= 1e-10
        assert np.all(np.diff(e.eigenvalues) >= 0)

    def test_matches_lapack(self, rng):
        a = random_hermitian(rng, 9)
        assert np.allclose(eigh(HermitianMatrix(a)).eigenvalues, np.linalg.eigvalsh(a), atol=1e-12)


class TestMatrixLog:
    def test_identity(self):
        assert np.max(np.abs(matrix_log(HermitianMatrix.identity(4)).entries)) == 0.0

    def test_diagonal(self):
        assert matrix_log(D([math.e, math.e**2])).allclose(D([1.0, 2.0]), atol=1e-14)

    def test_against_quadrature(self, rng):
        a = HermitianMatrix(random_pd(rng, 5, 50.0) / 10)
        err = np.max(np.abs(matrix_log(a).entries - log_quadrature(a, QuadratureSpec(200)).entries))
        assert err <= 1e-6

    def test_against_scipy(self, rng):
        from scipy.linalg import logm
        a = random_pd(rng, 6, 100.0)
        assert np.allclose(matrix_log(HermitianMatrix(a)).entries, logm(a), atol=1e-10)

    @pytest.mark.parametrize("diag", [[1.0, 0.0], [1.0, -0.5]])
    def test_rejects_non_pd(self, diag):
        with pytest.raises(DomainError, match="smallest eigenvalue"):
            matrix_log(D(diag))


class TestNorms:
    def test_trace_norm_examples(self):
        assert trace_norm(D([0.3, -0.3])) == pytest.approx(0.6, abs=1e-15)
        t = 0.25
        assert trace_norm(D([1 - t, t, 0]) - D([1 - t, 0, t])) == pytest.approx(0.5, abs=1e-15)
        assert trace_norm(HermitianMatrix.zeros(3)) == 0.0

    def test_operator_norm_examples(self):
        assert operator_norm(D([0.3, -0.3])) == pytest.approx(0.3)
        assert operator_norm(HermitianMatrix.identity(4)) == pytest.approx(1.0)

    @given(st.integers(2, 6), st.integers(0, 2**32 - 1), st.floats(0.01, 10.0))
    def test_traceless_operator_norm(self, d, seed, norm):
        delta = sample_traceless_hermitian(SamplerConfig(d, seed), norm)
        assert operator_norm(delta) <= trace_norm(delta) / 2 + 1e-12 * max(1.0, norm)


class TestJordan:
    def test_diagonal(self):
        parts = jordan_decompose(D([0.3, -0.3]))
        assert parts.plus.allclose(D([0.3, 0.0]))
        assert parts.minus.allclose(D([0.0, 0.3]))

    def test_psd_has_no_negative_part(self, rng):
        parts = jordan_decompose(HermitianMatrix(random_pd(rng, 4)))
        assert np.max(np.abs(parts.minus.entries)) <= 1e-12

    @given(st.integers(2, 6), st.integers(0, 2**32 - 1))
    def test_traceless_split(self, d, seed):
        delta = sample_traceless_hermitian(SamplerConfig(d, seed), 1.0)
        parts = jordan_decompose(delta)
        assert trace_norm(delta) == pytest.approx(2 * parts.plus.trace(), abs=1e-10)
        assert (parts.plus - parts.minus).allclose(delta, atol=1e-12)
        assert abs(np.trace(parts.plus.entries @ parts.minus.entries)) <= 1e-12
        assert is_psd(parts.plus, 1e-12) and is_psd(parts.minus, 1e-12)


class TestMinEigenvalueAndPsd:
    def test_examples(self):
        assert min_eigenvalue(D([0.1, 0.3, 0.6])) == pytest.approx(0.1)
        assert min_eigenvalue(HermitianMatrix.identity(3)) == pytest.approx(1.0)
        rho, _ = equality_states_corollary2(0.4)
        assert min_eigenvalue(rho) == 0.0

    def test_is_psd(self):
        assert is_psd(HermitianMatrix.identity(2), 0.0)
        assert is_psd(D([1.0, -1e-14]), 1e-12)
        assert not is_psd(D([1.0, -0.5]), 1e-12)
        with pytest.raises(ValueError):
            is_psd(HermitianMatrix.identity(2), -1.0)


class TestJson:
    def test_round_trip_is_exact(self, rng, tmp_path):
        m = HermitianMatrix(random_hermitian(rng, 5))
        path = tmp_path / "m.json"
        save_matrix(m, path)
        assert np.array_equal(load_matrix(path).entries, m.entries)

    def test_dict_form(self):
        doc = matrix_to_json(HermitianMatrix([[1, 1j], [-1j, 2]]))
        assert doc == {"dim": 2, "entries": [[[1.0, 0.0], [0.0, 1.0]], [[0.0, -1.0], [2.0, 0.0]]]}

    @pytest.mark.parametrize("doc", [
        [],
        {"dim": 2},
        {"dim": 0, "entries": []},
        {"dim": True, "entries": [[[1, 0]]]},
        {"dim": 2, "entries": [[[1, 0], [0, 0]]]},
        {"dim": 1, "entries": [[[1, 0, 0]]]},
        {"dim": 1, "entries": [[["1", 0]]]},
        {"dim": 2, "entries": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]},
        {"dim": 10_000, "entries": []},
    ])
    def test_malformed(self, doc):
        with pytest.raises(MatrixFormatError):
            matrix_from_json(doc)

    def test_invalid_json_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(MatrixFormatError):
            load_matrix(path)
