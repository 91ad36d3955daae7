"""Data generators behind the command-line experiments.

* :func:`brk_random`    -- ``brk`` over random Hermitian matrices or embeddings of
  Haar-random unitaries;
* :func:`qft_sweep`     -- ``brk`` of embedded perturbed Fourier matrices;
* :func:`spin_rotation_data` -- entries of ``exp(-i pi J_x/2)`` and its cost parameters.

Every random draw is reproducible: trial ``i`` at dimension ``dim`` uses the
seed sequence ``SeedSequence(seed, spawn_key=(dim, i))``, whose first 64-bit
word is reported as the trial seed.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._errors import ContractError
from .cost import cost_estimate
from .decompose.bands import brk_details, perturbed_qft
from .numerics import gaussian_hermitian, haar_unitary, is_unitary, loglog_slope, norms
from .simulate import exact_walk_steps, qft_matrix, spin_max_entry_formula, spin_rotation

ENSEMBLES = ("hermitian", "unitary_embedding")


def trial_seed(seed: int, dim: int, trial: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(dim), int(trial)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _one_brk(ensemble: str, dim: int, trial: int, seed: int, method: str) -> dict:
    s = trial_seed(seed, dim, trial)
    rng = np.random.default_rng(np.random.Philox(s))
    if ensemble == "hermitian":
        res = brk_details(gaussian_hermitian(dim, rng), method)
    else:
        # brk of [[0, U], [U^dagger, 0]] equals brk of U: bands and norms carry over
        res = brk_details(haar_unitary(dim // 2, rng), method)
    return {"dim": dim, "trial": trial, "seed": s, "brk": res.value,
            "method": "exact" if res.exact else "search"}


@dataclass
class BrkEnsembleResult:
    rows: list[dict]
    summary: list[dict]


def brk_random(ensemble: str, dims, trials: int, seed: int = 0, *, threads: int = 1,
               method: str | None = None) -> BrkEnsembleResult:
    """``brk`` for ``trials`` random matrices at each dimension.

    ``dim`` is the dimension of the Hamiltonian; for ``unitary_embedding`` the
    unitary has size ``dim/2``.  ``method`` defaults to ``"auto"`` for the
    Hermitian ensemble (exhaustive up to 160 distinct magnitudes, search
    above) and ``"exact"`` for unitaries.
    """
    if ensemble not in ENSEMBLES:
        raise ContractError(f"ensemble must be one of {ENSEMBLES}")
    if trials < 1:
        raise ContractError("trials must be >= 1")
    dims = [int(d) for d in dims]
    if ensemble == "unitary_embedding" and any(d % 2 or d < 2 for d in dims):
        raise ContractError("embedding dimensions must be even and >= 2")
    if any(d < 1 for d in dims):
        raise ContractError("dimensions must be positive")
    method = method or ("auto" if ensemble == "hermitian" else "exact")
    jobs = [(ensemble, d, i, seed, method) for d in dims for i in range(trials)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda a: _one_brk(*a), jobs))
    else:
        rows = [_one_brk(*a) for a in jobs]
    summary = []
    for d in dims:
        vals = np.array([r["brk"] for r in rows if r["dim"] == d])
        summary.append({"dim": d, "max": float(vals.max()), "mean": float(vals.mean()),
                        "trials": int(vals.size)})
    return BrkEnsembleResult(rows, summary)


@dataclass
class QftSweepResult:
    rows: list[dict]
    slope: float


def qft_sweep(Ns) -> QftSweepResult:
    """``brk`` of the embedded perturbed and unperturbed Fourier matrices, with ``sqrt(2N)``."""
    Ns = [int(N) for N in Ns]
    if any(N < 2 for N in Ns):
        raise ContractError("all N must be >= 2")
    rows = []
    for N in Ns:
        rows.append({"N": N, "dim": 2 * N, "brk": brk_details(perturbed_qft(N)).value,
                     "sqrt_dim": math.sqrt(2 * N),
                     "brk_unperturbed": brk_details(qft_matrix(N)).value})
    slope = loglog_slope([r["dim"] for r in rows], [r["brk"] for r in rows]) if len(rows) > 1 else float("nan")
    return QftSweepResult(rows, slope)


@dataclass
class SpinResult:
    rows: list[dict]
    summary: dict


def spin_rotation_data(J: float, eps: float = 0.1) -> SpinResult:
    """Entry magnitudes of ``U = exp(-i pi J_x/2)`` in the first and middle columns.

    The summary compares ``||U||_max`` with ``sqrt((2c)!)/(2^c c!)``
    (``c = ceil J``), reports ``||U||_1``, the corr11 prediction and the
    exact-walk step count.
    """
    U = spin_rotation(J)
    N = U.shape[0]
    mid = N // 2
    m = J - np.arange(N)
    rows = [{"index": j, "m": float(m[j]), "abs_first_column": float(abs(U[j, 0])),
             "abs_middle_column": float(abs(U[j, mid]))} for j in range(N)]
    nm = norms(U)
    formula = spin_max_entry_formula(J)
    l1 = max(nm.max_abs_row_sum, float(np.abs(U).sum(axis=0).max()))
    pred = cost_estimate("corr11", LambdaMax=nm.max_abs_entry, N=N, Lambda1=l1, eps=eps)
    gram = float(np.max(np.abs(U.conj().T @ U - np.eye(N))))
    summary = {"J": float(J), "N": N, "max_abs_entry": nm.max_abs_entry, "formula": formula,
               "ratio": nm.max_abs_entry / formula, "Lambda1": l1, "unitarity_error": gram,
               "is_unitary": bool(is_unitary(U, atol=1e-9)), "corr11": pred.value, "eps": eps,
               "exact_walk_steps": exact_walk_steps(nm.max_abs_entry, N)}
    return SpinResult(rows, summary)
