"""Coin-state preparation: exact, naive (rescaled) and amplitude-amplified.

A coin state for column ``j`` lives on ``C^n (x) C^2`` with basis index
``2*k + bit``.  Its ancilla-0 block carries ``sqrt(lam_bar/Lambda1) * sqrt(conj(H_jk))``;
the ancilla-1 block carries the leftover weight.

* ``exact``     -- ancilla-1 weight parked on one fixed state ``|Omega, 1>`` with
                   ``Omega = 0``; requires knowing the row sums ``sigma_j``.
* ``naive``     -- uniform superposition over the ``D`` slots of column ``j``
                   with each amplitude split as ``sqrt(H*/X)|0> + sqrt(1-|H|/X)|1>``,
                   ``X = Lambda1 / (lam_bar D)``; one sparsity and two element
                   queries per preparation.
* ``amplified`` -- the naive state with ``X = (2r+1)^2 Lambda1/(lam_bar D)``
                   followed by ``r`` rounds of amplitude amplification.  The
                   ancilla-0 weight is then only approximately right; the
                   relative error ``x_j`` is reported by :func:`column_diagnostics`.

Query charges per preparation (1 sparsity + 2 element queries per
application of the basic preparation, compute and uncompute):

* exact: ``D`` sparsity + ``2D`` element queries,
* naive: 3 queries,
* amplified: ``(2r+1) * 3`` queries (each of the ``2r`` reflections costs one
  inverse preparation plus one preparation, the reflection about ``|0>``
  is free, and there is one initial preparation).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ._errors import ContractError, PreconditionError
from .numerics import as_matrix, spectral_norm
from .oracle import NormBounds, OracleSet

MODES = ("exact", "naive", "amplified")
REL_TOL = 1e-12


def sqrt_conj(H) -> np.ndarray:
    """Entrywise square root of ``conj(H_jk)`` on a branch consistent across ``(j,k)``/``(k,j)``.

    Magnitude ``sqrt|H_jk|`` and phase ``-arg(H_jk)/2``, where ``arg`` is taken in
    ``(-pi, pi]`` on and above the diagonal and in ``[-pi, pi)`` below it, so that
    ``sqrt_conj(H)[k, j] * conj(sqrt_conj(H)[j, k]) == H[j, k]`` also for negative
    real entries.
    """
    H = np.asarray(H, dtype=complex)
    ang = np.angle(H)
    lower = np.tril(np.ones(H.shape, dtype=bool), -1)
    ang = np.where(lower & (ang >= np.pi), ang - 2 * np.pi, ang)
    return np.sqrt(np.abs(H)) * np.exp(-0.5j * ang)


@dataclass(frozen=True)
class CoinState:
    """Coin state of column ``j`` on basis ``|k, bit>`` (index ``2k + bit``)."""

    j: int
    amplitudes: np.ndarray
    lam_bar: float
    mode: str

    @property
    def ancilla0(self) -> np.ndarray:
        return self.amplitudes[0::2]

    @property
    def ancilla1(self) -> np.ndarray:
        return self.amplitudes[1::2]

    @property
    def good_weight(self) -> float:
        return float(np.sum(np.abs(self.ancilla0) ** 2))


# ---------------------------------------------------------------------------
# amplitude builders (pure; no query accounting)
# ---------------------------------------------------------------------------

def exact_coin_amplitudes(row_sqrt: np.ndarray, sigma_j: float, lam_bar: float,
                          Lambda1: float, omega: int = 0) -> np.ndarray:
    n = row_sqrt.shape[0]
    amp = np.zeros(2 * n, dtype=complex)
    if Lambda1 <= 0:
        # only the zero matrix has Lambda1 = 0: all weight on the flagged state
        if sigma_j > 0:
            raise PreconditionError("Lambda1 = 0 but the row is nonzero")
        amp[2 * omega + 1] = 1.0
        return amp
    amp[0::2] = math.sqrt(lam_bar / Lambda1) * row_sqrt
    rest = 1.0 - lam_bar * sigma_j / Lambda1
    if rest < -REL_TOL:
        raise PreconditionError(
            f"lam_bar * sigma_j / Lambda1 = {1 - rest:.6g} exceeds 1; Lambda1 is not a valid bound")
    amp[2 * omega + 1] = math.sqrt(max(rest, 0.0))
    return amp


def rescaled_coin_amplitudes(row: np.ndarray, row_sqrt: np.ndarray, slots: np.ndarray,
                             X: float) -> np.ndarray:
    """The state ``(1/sqrt D) sum_slots |k>[sqrt(H*/X)|0> + sqrt(1-|H|/X)|1>]``."""
    n = row.shape[0]
    D = len(slots)
    amp = np.zeros(2 * n, dtype=complex)
    mag = np.abs(row[slots])
    if np.any(mag > X * (1 + REL_TOL)):
        raise PreconditionError(f"entry magnitude {mag.max():.6g} exceeds X = {X:.6g}")
    if X <= 0:
        amp[2 * slots + 1] = 1 / math.sqrt(D)
        return amp
    amp[2 * slots] = row_sqrt[slots] / math.sqrt(X * D)
    amp[2 * slots + 1] = np.sqrt(np.clip(1.0 - mag / X, 0.0, None) / D)
    return amp


# ---------------------------------------------------------------------------
# amplitude amplification plan
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrepPlan:
    """Parameters of the amplitude-amplified preparation.

    Per-column arrays (``sigma``, ``theta``, ``r_opt``, ``x``) are ``None`` until
    :func:`column_diagnostics` fills them from the row sums.
    """

    r: int
    X: float
    lam_bar: float
    Lambda: float
    Lambda1: float
    LambdaMax: float
    D: int
    sigma: np.ndarray | None = None
    theta: np.ndarray | None = None
    r_opt: np.ndarray | None = None
    x: np.ndarray | None = None

    @property
    def queries_per_prep(self) -> int:
        return 3 * max(1, 2 * self.r + 1)

    @property
    def x_max(self) -> float:
        if self.x is None:
            raise ContractError("column diagnostics not computed")
        return float(np.max(np.abs(self.x)))


def choose_r_X(bounds: NormBounds, D: int, lam_bar: float) -> PrepPlan:
    """Grover count ``r = ceil(sqrt(lam_bar LambdaMax D / Lambda1)/2 - 1/2)`` and ``X``."""
    if not (0.0 < lam_bar <= 1.0):
        raise ContractError(f"lam_bar must lie in (0, 1], got {lam_bar}")
    if bounds.Lambda1 <= 0:
        raise ContractError("Lambda1 must be positive")
    arg = 0.5 * math.sqrt(lam_bar * bounds.LambdaMax * D / bounds.Lambda1) - 0.5
    r = max(0, math.ceil(arg - 1e-12))
    X = (2 * r + 1) ** 2 * bounds.Lambda1 / (lam_bar * D)
    return PrepPlan(r=r, X=X, lam_bar=lam_bar, Lambda=bounds.Lambda, Lambda1=bounds.Lambda1,
                    LambdaMax=bounds.LambdaMax, D=D)


def column_diagnostics(plan: PrepPlan, sigma) -> PrepPlan:
    """Fill ``theta_j``, ``r_opt_j`` and the relative weighting error ``x_j``.

    ``sin(theta_j) = sqrt(sigma_j / (D X))``;
    ``x_j = sqrt(Lambda1/(lam_bar sigma_j)) sin((2r+1) theta_j) - 1`` (0 when ``sigma_j = 0``);
    ``r_opt_j`` solves ``sin((2 r_opt + 1) theta_j) = sqrt(lam_bar sigma_j / Lambda1)``.
    """
    sigma = np.asarray(sigma, dtype=float)
    s = np.sqrt(np.clip(sigma / (plan.D * plan.X), 0.0, 1.0))
    theta = np.arcsin(s)
    target = np.sqrt(np.clip(plan.lam_bar * sigma / plan.Lambda1, 0.0, 1.0))
    pos = sigma > 0
    x = np.zeros_like(sigma)
    r_opt = np.full_like(sigma, np.nan)
    x[pos] = np.sin((2 * plan.r + 1) * theta[pos]) / target[pos] - 1.0
    r_opt[pos] = 0.5 * (np.arcsin(target[pos]) / theta[pos] - 1.0)
    return replace(plan, sigma=sigma, theta=theta, r_opt=r_opt, x=x)


def amplified_coin_amplitudes(row: np.ndarray, row_sqrt: np.ndarray, slots: np.ndarray,
                              plan: PrepPlan) -> np.ndarray:
    """Closed form of ``(R_b R_f)^r |phi_b>``: a rotation by ``2r theta`` in the good/bad plane."""
    n = row.shape[0]
    D = len(slots)
    mag = np.abs(row[slots])
    sigma = float(mag.sum())
    amp = np.zeros(2 * n, dtype=complex)
    if np.any(mag > plan.X * (1 + REL_TOL)):
        raise PreconditionError(f"entry magnitude {mag.max():.6g} exceeds X = {plan.X:.6g}")
    bad = np.sqrt(np.clip(1.0 - mag / plan.X, 0.0, None))
    bad_norm = float(np.linalg.norm(bad))
    if sigma == 0.0:
        amp[2 * slots + 1] = bad / bad_norm
        return amp
    theta = math.asin(min(1.0, math.sqrt(sigma / (D * plan.X))))
    ang = (2 * plan.r + 1) * theta
    amp[2 * slots] = math.sin(ang) * row_sqrt[slots] / math.sqrt(sigma)
    if bad_norm > 0:
        amp[2 * slots + 1] = math.cos(ang) * bad / bad_norm
    return amp


def amplified_prep_literal(row: np.ndarray, row_sqrt: np.ndarray, slots: np.ndarray,
                           plan: PrepPlan) -> np.ndarray:
    """Same state as :func:`amplified_coin_amplitudes`, by explicit reflection products."""
    n = row.shape[0]
    start = rescaled_coin_amplitudes(row, row_sqrt, slots, plan.X)
    good = np.zeros(2 * n)
    good[0::2] = 1.0
    R_f = np.diag(1.0 - 2.0 * good).astype(complex)       # flips the ancilla-0 sector
    R_b = 2.0 * np.outer(start, start.conj()) - np.eye(2 * n)
    v = start.copy()
    for _ in range(plan.r):
        v = R_b @ (R_f @ v)
    return v


def amplified_prep(oset: OracleSet, j: int, plan: PrepPlan) -> tuple[CoinState, int]:
    """Prepare ``|phi_j(r)>`` and charge ``(2r+1)`` basic preparations to the ledger."""
    H = oset.dense()
    slots = oset.pattern()[j]
    row = H[j]
    amp = amplified_coin_amplitudes(row, sqrt_conj(H)[j], slots, plan)
    n_prep = max(1, 2 * plan.r + 1)
    oset.charge(element=2 * n_prep, sparsity=n_prep)
    return CoinState(j, amp, plan.lam_bar, "amplified"), 3 * n_prep


def naive_max_lam_bar(bounds: NormBounds, D: int) -> float:
    """Largest laziness for which ``X = Lambda1/(lam_bar D)`` dominates ``LambdaMax``."""
    if bounds.LambdaMax == 0:
        return 1.0
    return min(1.0, bounds.Lambda1 / (D * bounds.LambdaMax))


def lemma5_deviation(H, plan: PrepPlan, *, Lambda: float | None = None) -> tuple[float, float]:
    """Spectral distance between the amplified and ideal effective Hamiltonians, and its bound.

    ``H' = (lam_bar/Lambda1) H_jk (1+x_j)(1+x_k)`` versus ``lam_bar H / Lambda1``; the bound is
    ``(lam_bar Lambda / Lambda1)(2 x_max + x_max^2)``.
    """
    H = as_matrix(H, hermitian=True)
    if plan.x is None:
        plan = column_diagnostics(plan, np.abs(H).sum(axis=1))
    scale = plan.lam_bar / plan.Lambda1
    f = 1.0 + plan.x
    Ht = scale * H
    Hp = Ht * np.outer(f, f)
    dev = spectral_norm(Hp - Ht)
    lam = plan.Lambda if Lambda is None else Lambda
    xm = plan.x_max
    bound = scale * lam * (2 * xm + xm ** 2)
    if dev > bound + 1e-12:
        raise AssertionError(f"deviation {dev:.3e} exceeds bound {bound:.3e}")
    return dev, bound


def amplified_effective_hamiltonian(H, plan: PrepPlan) -> np.ndarray:
    """``H'_jk = (lam_bar/Lambda1) H_jk (1+x_j)(1+x_k)``."""
    H = np.asarray(H, dtype=complex)
    if plan.x is None:
        plan = column_diagnostics(plan, np.abs(H).sum(axis=1))
    f = 1.0 + plan.x
    return (plan.lam_bar / plan.Lambda1) * H * np.outer(f, f)


def write_diagnostics_csv(path: str | Path, plan: PrepPlan) -> None:
    if plan.x is None:
        raise ContractError("column diagnostics not computed")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j", "sigma_j", "theta_j", "r_opt", "x_j"])
        for j in range(len(plan.x)):
            w.writerow([j, repr(float(plan.sigma[j])), repr(float(plan.theta[j])),
                        repr(float(plan.r_opt[j])), repr(float(plan.x[j]))])
