import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from walksim._errors import ContractError
from walksim.decompose import band, brk, brk_details, magnitude_levels, partition, perturbed_qft
from walksim.numerics import haar_unitary, make_rng
from walksim.simulate import embed_unitary, qft_matrix

from conftest import random_hermitian


def brute_force_brk(H):
    """Independent oracle: every pair of cutoffs taken from the distinct magnitudes."""
    absH = np.abs(H)
    cuts = np.concatenate([[0.0], np.unique(absH[absH > 0])])
    best = 0.0
    for i, a in enumerate(cuts):
        for b in cuts[i + 1:]:
            M = np.where((absH > a) & (absH <= b), H, 0)
            best = max(best, np.linalg.norm(M, 2))
    return max(1.0, best / np.linalg.norm(H, 2))


@given(n=st.integers(1, 6), seed=st.integers(0, 10**6), cuts=st.lists(st.floats(0, 3), min_size=1, max_size=4))
def test_partition_sums_to_H(n, seed, cuts):
    H = random_hermitian(n, np.random.default_rng(seed))
    cuts = sorted(set(cuts), reverse=True)
    if any(cuts[i] - cuts[i + 1] < 1e-9 for i in range(len(cuts) - 1)):
        return
    bands = partition(H, cuts)
    np.testing.assert_array_equal(sum(b.matrix for b in bands), H)
    # bands are disjoint
    support = sum((b.matrix != 0).astype(int) for b in bands)
    assert support.max() <= 1


def test_partition_first_band_open_above():
    H = np.array([[5.0, 0.1], [0.1, 0.0]])
    bands = partition(H, [1.0, 0.5])
    assert bands[0].matrix[0, 0] == 5.0 and bands[1].matrix[0, 1] == 0.1


def test_band_contract():
    with pytest.raises(ContractError):
        band(np.eye(2), 0.5, 0.1)
    with pytest.raises(ContractError):
        partition(np.eye(2), [0.5, 0.5])
    assert band(np.eye(2), 1.0, 2.0).is_zero


def test_magnitude_levels_cluster_rounding_noise():
    A = np.array([[1.0, 1.0 + 1e-13], [0.5, 0.0]])
    uppers, level = magnitude_levels(A)
    assert len(uppers) == 2
    assert level[0, 0] == level[0, 1] == 1 and level[1, 1] == -1


@pytest.mark.parametrize("seed", range(8))
def test_exact_brk_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    H = random_hermitian(5, rng)
    assert brk(H) == pytest.approx(brute_force_brk(H), rel=1e-10)


def test_exact_brk_unitary_matches_brute_force():
    U = haar_unitary(4, make_rng(2))
    assert brk(U) == pytest.approx(brute_force_brk(U), rel=1e-10)


def test_brk_identity_and_equal_magnitudes():
    assert brk(np.eye(2)) == 1.0
    assert brk(np.eye(7)) == 1.0
    assert brk(qft_matrix(32)) == pytest.approx(1.0)


@given(n=st.integers(2, 12), seed=st.integers(0, 10**6))
def test_brk_between_one_and_sqrt_dim(n, seed):
    H = random_hermitian(n, np.random.default_rng(seed))
    v = brk(H, "auto")
    assert 1.0 <= v <= math.sqrt(n) * (1 + 1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_search_is_lower_bound_of_exact(seed):
    H = random_hermitian(12, np.random.default_rng(seed))
    ex = brk_details(H, "exact")
    se = brk_details(H, "search")
    assert se.value <= ex.value * (1 + 1e-12)
    assert se.value >= 0.95 * ex.value
    assert ex.exact and not se.exact


def test_brk_of_embedding_equals_brk_of_unitary():
    U = haar_unitary(4, make_rng(4))
    assert brk(embed_unitary(U)) == pytest.approx(brk(U), rel=1e-12)


def test_brk_maximizing_band_reported():
    H = random_hermitian(6, np.random.default_rng(1))
    r = brk_details(H)
    M = band(H, r.a, r.b).matrix
    assert np.linalg.norm(M, 2) / np.linalg.norm(H, 2) == pytest.approx(r.value)


def test_brk_contract():
    with pytest.raises(ContractError):
        brk(np.zeros((2, 2)))
    with pytest.raises(ContractError):
        brk(np.eye(2), "guess")


def test_perturbed_qft_two_magnitudes():
    P = perturbed_qft(16)
    mags = np.unique(np.round(np.abs(P) * 4, 9))
    assert np.allclose(mags, [0.9999, 1.0001])
    # entries with positive real part are the enlarged ones
    F = qft_matrix(16)
    big = np.abs(P) > 0.25
    assert np.all(F.real[big] > 0) and np.all(F.real[~big] <= 1e-12)
    with pytest.raises(ContractError):
        perturbed_qft(1)


def test_perturbed_qft_two_is_one_band():
    # N = 2: entries +-1/sqrt2; only the +1 entries are enlarged
    P = perturbed_qft(2)
    assert np.isclose(abs(P[1, 1]), 0.9999 / math.sqrt(2))
    assert brk(P) >= 1.0
