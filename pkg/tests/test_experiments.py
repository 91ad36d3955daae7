import math

import numpy as np
import pytest

from walksim._errors import ContractError
from walksim.experiments import brk_random, qft_sweep, spin_rotation_data, trial_seed


def test_brk_random_rows_and_summary():
    res = brk_random("hermitian", [2, 4], 3, seed=5)
    assert [(r["dim"], r["trial"]) for r in res.rows] == [(2, 0), (2, 1), (2, 2), (4, 0), (4, 1), (4, 2)]
    for s in res.summary:
        vals = [r["brk"] for r in res.rows if r["dim"] == s["dim"]]
        assert s["max"] == max(vals) and s["mean"] == pytest.approx(np.mean(vals))
        assert s["max"] >= 1.0


def test_brk_random_reproducible_and_thread_independent():
    a = brk_random("unitary_embedding", [4, 6], 4, seed=1)
    b = brk_random("unitary_embedding", [4, 6], 4, seed=1, threads=3)
    assert a.rows == b.rows
    assert trial_seed(1, 4, 0) != trial_seed(1, 4, 1)


def test_dimension_two_embedding_is_one():
    # a 1x1 unitary has a single magnitude: one band, brk = 1
    res = brk_random("unitary_embedding", [2], 1, seed=0)
    assert res.rows[0]["brk"] == 1.0


def test_brk_random_contract():
    with pytest.raises(ContractError):
        brk_random("hermitian", [4], 0)
    with pytest.raises(ContractError):
        brk_random("unitary_embedding", [5], 1)
    with pytest.raises(ContractError):
        brk_random("wishart", [4], 1)


def test_qft_sweep_columns():
    res = qft_sweep([8, 16])
    assert [r["dim"] for r in res.rows] == [16, 32]
    assert res.rows[0]["sqrt_dim"] == 4.0
    assert all(r["brk_unperturbed"] == pytest.approx(1.0) for r in res.rows)
    assert res.rows[1]["brk"] > res.rows[0]["brk"] > 1
    with pytest.raises(ContractError):
        qft_sweep([1])


@pytest.mark.parametrize("J,expected", [(0.5, 1 / math.sqrt(2)), (2, math.sqrt(24) / 8)])
def test_spin_rotation_max_entry(J, expected):
    res = spin_rotation_data(J)
    assert res.summary["max_abs_entry"] == pytest.approx(expected, rel=1e-12)
    assert res.summary["N"] == int(2 * J + 1) == len(res.rows)


def test_spin_rotation_large_J_unitary():
    res = spin_rotation_data(100)
    assert res.summary["unitarity_error"] < 1e-9
    col = np.array([r["abs_first_column"] for r in res.rows])
    # first column of a rotation by pi/2: binomial amplitudes sqrt(C(2J, k)) / 2^J
    k = np.arange(201)
    logb = 0.5 * (math.lgamma(201) - np.array([math.lgamma(i + 1) + math.lgamma(201 - i) for i in k])) \
        - 100 * math.log(2)
    np.testing.assert_allclose(col, np.exp(logb), atol=1e-10)
