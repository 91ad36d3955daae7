import math

import numpy as np
import pytest

from walksim._errors import ContractError
from walksim.decompose import (brk, large_norm_schedule, partition, simulate_decomposed,
                               small_norm_schedule)
from walksim.numerics import expm_hermitian
from walksim.oracle import OracleSet
from walksim.simulate import simulate_theorem1

from conftest import log_uniform_hermitian, random_hermitian, two_scale_hermitian


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("eps", [0.2, 0.1])
def test_small_norm_meets_eps_with_several_bands(seed, eps):
    H = log_uniform_hermitian(12, np.random.default_rng(seed))
    o = OracleSet.from_dense(H)
    s = small_norm_schedule(o.bounds, o.D, 1.0, eps, brk(H))
    rep = simulate_decomposed(o, s)
    assert rep.distance <= eps
    assert len(s.cutoffs) - 1 - len(rep.metadata["dropped_bands"]) >= 2
    band_total = sum(q["total"] for q in rep.params["band_queries"])
    assert rep.ledger.total == band_total > 0


def test_single_nonzero_band_runs_unbanded():
    # all entries in the lowest band: identical to a plain naive-walk run
    H = random_hermitian(12, np.random.default_rng(0))
    H /= np.linalg.norm(H, 2)
    o = OracleSet.from_dense(H)
    s = small_norm_schedule(o.bounds, o.D, 1.0, 0.1, brk(H))
    nonzero = [b for b in partition(H, s.cutoffs[:s.L]) if not b.is_zero]
    assert len(nonzero) == 1
    rep = simulate_decomposed(o, s, seed=3)
    ref = simulate_theorem1(OracleSet.from_dense(H), 1.0, 0.1, seed=3)
    np.testing.assert_allclose(rep.output.matrix, ref.output.matrix, atol=1e-14)
    assert "single nonzero band" in rep.metadata["decomposition"]


def test_commuting_diagonal_bands_are_exact_up_to_walk_error():
    H = np.diag([1.0, 0.3, 0.05, 0.01]).astype(complex)
    o = OracleSet.from_dense(H, [[j] for j in range(4)])
    s = small_norm_schedule(o.bounds, 4, 1.0, 0.5, 1.0)
    rep = simulate_decomposed(o, s, psi=np.ones(4))
    # bands commute, so all error comes from the walks: well inside eps
    assert rep.distance <= 0.5 * 1e-2


def test_large_norm_L2_run():
    H = two_scale_hermitian(64, np.random.default_rng(0))
    o = OracleSet.from_dense(H)
    s = large_norm_schedule(o.bounds, o.D, 0.8, 0.5)
    assert s.L == 2
    rep = simulate_decomposed(o, s)
    assert rep.distance <= 0.5
    assert rep.params["segments"] >= 3
    assert "t2" in rep.predictions


def test_theorem1_schedule_falls_back():
    H = random_hermitian(4, np.random.default_rng(2))
    H /= np.linalg.norm(H, 2)
    o = OracleSet.from_dense(H)
    s = large_norm_schedule(o.bounds, 4, 1.0, 0.5)
    rep = simulate_decomposed(o, s)
    assert s.kind == "theorem1" and rep.distance <= 0.5
    assert rep.metadata["decomposition"].startswith("unbanded fallback")


def test_mismatched_time_rejected():
    H = log_uniform_hermitian(12, np.random.default_rng(0))
    o = OracleSet.from_dense(H)
    s = small_norm_schedule(o.bounds, 12, 1.0, 0.1, brk(H))
    with pytest.raises(ContractError):
        simulate_decomposed(o, s, t=2.0)


def test_ideal_output_is_exact_exponential():
    H = log_uniform_hermitian(12, np.random.default_rng(1))
    o = OracleSet.from_dense(H)
    psi = np.zeros(12)
    psi[0] = 1
    rep = simulate_decomposed(o, small_norm_schedule(o.bounds, 12, 1.0, 0.1, brk(H)), psi=psi)
    w = expm_hermitian(H, 1.0)[:, 0]
    np.testing.assert_allclose(rep.ideal.matrix, np.outer(w, w.conj()), atol=1e-12)
