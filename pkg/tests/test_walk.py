import numpy as np
import pytest
from hypothesis import given, strategies as st

from walksim._errors import ContractError, PreconditionError, SpectralMismatchError
from walksim.numerics import is_unitary
from walksim.oracle import NormBounds, OracleSet
from walksim.walk import (build_walk, coin_matrix, coin_state, effective_hamiltonian,
                          predicted_eigenphases, swap, two_dimensional_blocks,
                          walk_coefficient_matrix, walk_from_coins, walk_spectrum_check)

from conftest import random_hermitian


def nonneg_diag_hermitian(n, rng):
    H = random_hermitian(n, rng)
    H[np.diag_indices(n)] = np.abs(np.diag(H))
    return H


def test_swap_is_an_involution(rng):
    v = rng.standard_normal((16, 3))
    np.testing.assert_array_equal(swap(swap(v, 4), 4), v)
    e = np.zeros((9, 1))
    e[1 * 3 + 2] = 1          # |1> (x) |2>
    assert swap(e, 3)[2 * 3 + 1, 0] == 1


@given(n=st.integers(1, 6), seed=st.integers(0, 10**6), lam_bar=st.floats(0.05, 1.0))
def test_exact_effective_hamiltonian_is_rescaled_H(n, seed, lam_bar):
    H = nonneg_diag_hermitian(n, np.random.default_rng(seed))
    o = OracleSet.from_dense(H)
    ws = build_walk(o, lam_bar, "exact")
    np.testing.assert_allclose(effective_hamiltonian(ws), lam_bar * H / o.bounds.Lambda1,
                               atol=1e-12)


def test_walk_spectrum_against_full_space_diagonalization(rng):
    # independent oracle: eigenvalues of the walk on the whole (2n)^2 space
    H = nonneg_diag_hermitian(3, rng)
    o = OracleSet.from_dense(H)
    ws = build_walk(o, 0.6, "exact")
    Vfull = ws.full_walk()
    assert is_unitary(Vfull, atol=1e-12)
    ev = np.linalg.eigvals(Vfull)
    lt = 0.6 * np.linalg.eigvalsh(H) / o.bounds.Lambda1
    mp, mm = predicted_eigenphases(lt)
    for a, b in zip(mp, mm):
        assert np.min(np.abs(ev - a)) < 1e-9
        assert np.min(np.abs(ev - b)) < 1e-9
    chk = walk_spectrum_check(ws, H)
    assert chk.max_error < 1e-9


def test_subspace_walk_is_restriction_of_full_walk(rng):
    H = nonneg_diag_hermitian(3, rng)
    ws = build_walk(OracleSet.from_dense(H), 0.9, "exact")
    Vfull = ws.full_walk()
    np.testing.assert_allclose(Vfull @ ws.basis, ws.basis @ ws.V, atol=1e-12)


def test_coefficient_matrix_spectrum_matches_prediction(rng):
    Ht = 0.3 * nonneg_diag_hermitian(4, rng) / 4
    ev = np.linalg.eigvals(walk_coefficient_matrix(Ht))
    mp, mm = predicted_eigenphases(np.linalg.eigvalsh(Ht))
    for z in np.concatenate([mp, mm]):
        assert np.min(np.abs(ev - z)) < 1e-8


def test_walk_acts_in_two_dimensional_blocks(rng):
    H = nonneg_diag_hermitian(4, rng)
    ws = build_walk(OracleSet.from_dense(H), 0.5, "exact")
    assert two_dimensional_blocks(ws, H) < 1e-10


def test_spectrum_mismatch_is_reported(rng):
    H = nonneg_diag_hermitian(3, rng)
    ws = build_walk(OracleSet.from_dense(H), 0.5, "exact")
    with pytest.raises(SpectralMismatchError):
        walk_spectrum_check(ws, H + np.eye(3))


def test_coin_state_query_charges(rng):
    H = nonneg_diag_hermitian(4, rng)
    o = OracleSet.from_dense(H)
    coin_state(o, 0, 0.5, "exact")
    assert (o.ledger.OF, o.ledger.OH) == (4, 8)
    o = OracleSet.from_dense(H)
    coin_state(o, 0, o.bounds.Lambda1 / (4 * o.bounds.LambdaMax), "naive")
    assert o.ledger.total == 3


def test_naive_mode_rejects_large_lam_bar(rng):
    H = nonneg_diag_hermitian(4, rng)
    o = OracleSet.from_dense(H)
    with pytest.raises(PreconditionError):
        coin_state(o, 0, 1.0, "naive")


def test_naive_effective_hamiltonian(rng):
    H = nonneg_diag_hermitian(4, rng)
    b = NormBounds.exact(H)
    lam = b.Lambda1 / (4 * b.LambdaMax)
    ws = walk_from_coins(coin_matrix(H, lam, b.Lambda1, "naive"), lam, b.Lambda1, "naive")
    np.testing.assert_allclose(effective_hamiltonian(ws), lam * H / b.Lambda1, atol=1e-12)


def test_lam_bar_range_enforced(rng):
    o = OracleSet.from_dense(nonneg_diag_hermitian(2, rng))
    with pytest.raises(ContractError):
        build_walk(o, 1.5)
    with pytest.raises(ContractError):
        coin_state(o, 0, 0.5, "bogus")


def test_zero_matrix_walk_squares_to_one():
    # H = 0: every coin state sits on the ancilla-1 flag, so V^2 = +1 on the subspace
    ws = build_walk(OracleSet.from_dense(np.zeros((2, 2))), 1.0, "exact")
    np.testing.assert_allclose(ws.V @ ws.V, np.eye(ws.V.shape[0]), atol=1e-12)
