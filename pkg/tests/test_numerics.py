import json

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from walksim._errors import ContractError
from walksim.numerics import (DensityOperator, as_matrix, expm_hermitian, function_of_hermitian,
                              gaussian_hermitian, haar_unitary, hermitian_spectrum, is_hermitian,
                              is_unitary, loglog_slope, make_rng, matrix_from_json, matrix_to_json,
                              norms, random_ensembles, read_matrix, spectral_norm, trace_distance,
                              unitary_spectrum, write_matrix)

from conftest import random_hermitian


@given(n=st.integers(1, 8), seed=st.integers(0, 2**32 - 1), t=st.floats(-5, 5))
def test_expm_matches_scipy(n, seed, t):
    H = random_hermitian(n, np.random.default_rng(seed))
    np.testing.assert_allclose(expm_hermitian(H, t), scipy.linalg.expm(-1j * t * H), atol=1e-10)


def test_expm_of_sigma_x_quarter_period():
    X = np.array([[0, 1], [1, 0]])
    np.testing.assert_allclose(expm_hermitian(X, np.pi / 2), -1j * X, atol=1e-15)


@given(n=st.integers(1, 10), seed=st.integers(0, 2**32 - 1))
def test_norms_match_numpy(n, seed):
    A = random_hermitian(n, np.random.default_rng(seed))
    nm = norms(A)
    assert nm.spectral == pytest.approx(np.linalg.norm(A, 2), rel=1e-12)
    assert nm.max_abs_row_sum == pytest.approx(np.linalg.norm(A, np.inf), rel=1e-12)
    assert nm.max_abs_entry == pytest.approx(np.abs(A).max())
    assert nm.spectral <= nm.max_abs_row_sum * (1 + 1e-12)


def test_spectral_norm_of_zero_matrix():
    assert spectral_norm(np.zeros((3, 3))) == 0.0


def test_hermitian_spectrum_reconstructs(rng):
    H = random_hermitian(6, rng)
    spec = hermitian_spectrum(H)
    np.testing.assert_allclose(spec.reconstruct(), H, atol=1e-12)


def test_unitary_spectrum_degenerate_eigenvectors_orthonormal():
    U = np.diag([1, 1, -1, 1j]).astype(complex)
    Q0 = haar_unitary(4, make_rng(3))
    U = Q0 @ U @ Q0.conj().T
    spec = unitary_spectrum(U)
    Q = spec.eigenvectors
    np.testing.assert_allclose(Q.conj().T @ Q, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(spec.reconstruct(), U, atol=1e-12)


def test_function_of_hermitian_square():
    H = random_hermitian(5, np.random.default_rng(0))
    np.testing.assert_allclose(function_of_hermitian(H, lambda w: w ** 2), H @ H, atol=1e-10)


@pytest.mark.parametrize("bad", [np.zeros((2, 3)), np.zeros((0, 0)), np.array([[np.nan]])])
def test_as_matrix_rejects_malformed(bad):
    with pytest.raises(ContractError):
        as_matrix(bad)


def test_as_matrix_rejects_non_hermitian():
    with pytest.raises(ContractError):
        as_matrix([[0, 1], [0, 0]], hermitian=True)


def test_trace_distance_matches_nuclear_norm(rng):
    a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    a /= np.linalg.norm(a)
    b /= np.linalg.norm(b)
    rho, sigma = DensityOperator.pure(a), DensityOperator.pure(b)
    nuclear = 0.5 * np.linalg.svd(rho.matrix - sigma.matrix, compute_uv=False).sum()
    pure_formula = np.sqrt(1 - abs(np.vdot(a, b)) ** 2)
    assert trace_distance(rho, sigma) == pytest.approx(nuclear, abs=1e-12)
    assert trace_distance(rho, sigma) == pytest.approx(pure_formula, abs=1e-12)


def test_trace_distance_counts_failure_weight():
    psi = np.array([1.0, 0.0])
    full = DensityOperator.pure(psi)
    lossy = DensityOperator(0.9 * np.outer(psi, psi), 0.1)
    # 0.05 from the missing population plus 0.05 from the failure outcome
    assert trace_distance(full, lossy) == pytest.approx(0.1)


def test_seeded_ensembles_are_reproducible():
    A = random_ensembles("gaussian_hermitian", 5, 7)
    B = random_ensembles("gaussian_hermitian", 5, 7)
    np.testing.assert_array_equal(A, B)
    assert is_hermitian(A)
    U = random_ensembles("haar_unitary", 6, 7)
    assert is_unitary(U, atol=1e-12)
    with pytest.raises(ContractError):
        random_ensembles("poisson", 3, 0)


def test_haar_unitary_first_moment():
    # E|U_00|^2 = 1/n for Haar-distributed U
    rng = make_rng(11)
    vals = [abs(haar_unitary(4, rng)[0, 0]) ** 2 for _ in range(4000)]
    assert np.mean(vals) == pytest.approx(0.25, abs=0.015)


def test_gaussian_hermitian_variances():
    rng = make_rng(5)
    H = np.array([gaussian_hermitian(6, rng) for _ in range(3000)])
    assert np.var(H[:, 0, 0].real) == pytest.approx(1.0, rel=0.1)
    assert np.var(H[:, 0, 1].real) == pytest.approx(0.5, rel=0.1)


def test_matrix_json_round_trip(tmp_path, rng):
    A = random_hermitian(3, rng)
    p = tmp_path / "m.json"
    write_matrix(p, A)
    np.testing.assert_array_equal(read_matrix(p), A)
    assert matrix_from_json(json.loads(json.dumps(matrix_to_json(A)))).shape == (3, 3)
    with pytest.raises(ContractError):
        matrix_from_json({"dim": 2, "entries": [[0, 0]]})


def test_loglog_slope_exact_power():
    x = np.array([1, 2, 4, 8.0])
    assert loglog_slope(x, 3 * x ** 1.5) == pytest.approx(1.5)
