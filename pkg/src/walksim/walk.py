"""The quantum walk ``V = i S (2 T T^dagger - 1)`` built from coin states.

The walk acts on ``C^{2n} (x) C^{2n}``; a basis state ``|k, bit>`` of one factor
has index ``2k + bit`` and the product index is ``a * 2n + b``.  The isometry
``T`` maps ``|j>`` to ``|j, 0> (x) |phi_j>``.  ``S`` swaps the two factors.

All spectral work is done on the invariant subspace ``span{T|j>, S T|j>}``
(dimension at most ``2n``) rather than on the full ``4 n^2``-dimensional space.
For an eigenvector ``|lam>`` of the effective Hamiltonian ``T^dagger S T`` with
eigenvalue ``lt`` the walk has the two eigenvalues ``+-exp(+-i arcsin(lt))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._errors import ContractError, PreconditionError, SpectralMismatchError
from .numerics import Spectrum, as_matrix, unitary_spectrum
from .oracle import OracleSet
from .stateprep import (
    MODES,
    CoinState,
    PrepPlan,
    amplified_coin_amplitudes,
    choose_r_X,
    column_diagnostics,
    exact_coin_amplitudes,
    naive_max_lam_bar,
    rescaled_coin_amplitudes,
    sqrt_conj,
)

OMEGA = 0          # the fixed state |Omega> used for the exact-mode ancilla-1 block


def _check_lam_bar(lam_bar: float) -> None:
    if not (0.0 < lam_bar <= 1.0):
        raise ContractError(f"lam_bar must lie in (0, 1], got {lam_bar}")


def coin_state(oset: OracleSet, j: int, lam_bar: float, mode: str = "exact",
               plan: PrepPlan | None = None) -> CoinState:
    """Prepare the coin state of column ``j`` and charge the ledger.

    ``exact`` reads every slot of the column through the oracles
    (``D`` sparsity and ``2D`` element queries).  ``naive`` requires
    ``lam_bar <= Lambda1 / (D LambdaMax)`` and is charged 3 queries.
    ``amplified`` uses ``plan`` (default :func:`choose_r_X`) and is charged
    ``3 (2r + 1)`` queries.
    """
    _check_lam_bar(lam_bar)
    if mode not in MODES:
        raise ContractError(f"unknown mode {mode!r}")
    b = oset.bounds
    n, D = oset.dim, oset.D
    if mode == "exact":
        row = np.zeros(n, dtype=complex)
        for k in range(D):
            i = oset.query_sparsity(j, k)
            row[i] = oset.query_element(j, i)
            oset.charge(element=1)          # uncompute the value register
        amp = exact_coin_amplitudes(_row_sqrt(row, j),
                                    float(np.abs(row).sum()), lam_bar, b.Lambda1, OMEGA)
        return CoinState(j, amp, lam_bar, mode)
    H = oset.dense()
    slots = oset.pattern()[j]
    if mode == "naive":
        limit = naive_max_lam_bar(b, D)
        if lam_bar > limit * (1 + 1e-12):
            raise PreconditionError(
                f"naive preparation needs lam_bar <= Lambda1/(D LambdaMax) = {limit:.6g}, got {lam_bar}")
        X = b.Lambda1 / (lam_bar * D)
        amp = rescaled_coin_amplitudes(H[j], sqrt_conj(H)[j], slots, X)
        oset.charge(element=2, sparsity=1)
        return CoinState(j, amp, lam_bar, mode)
    plan = plan if plan is not None else choose_r_X(b, D, lam_bar)
    amp = amplified_coin_amplitudes(H[j], sqrt_conj(H)[j], slots, plan)
    n_prep = max(1, 2 * plan.r + 1)
    oset.charge(element=2 * n_prep, sparsity=n_prep)
    return CoinState(j, amp, lam_bar, mode)


def _row_sqrt(row: np.ndarray, j: int) -> np.ndarray:
    """Branch-consistent ``sqrt(conj(H_jk))`` for one row (row index ``j``)."""
    ang = np.angle(row)
    below = np.arange(row.shape[0]) < j          # entries (j, k) with j > k
    ang = np.where(below & (ang >= np.pi), ang - 2 * np.pi, ang)
    return np.sqrt(np.abs(row)) * np.exp(-0.5j * ang)


def coin_matrix(H, lam_bar: float, Lambda1: float, mode: str = "exact", *,
                pattern: np.ndarray | None = None, LambdaMax: float | None = None,
                plan: PrepPlan | None = None) -> np.ndarray:
    """All coin states as columns of a ``2n x n`` matrix, without query accounting."""
    H = as_matrix(H)
    n = H.shape[0]
    R = sqrt_conj(H)
    sigma = np.abs(H).sum(axis=1)
    pat = pattern if pattern is not None else np.tile(np.arange(n), (n, 1))
    D = pat.shape[1]
    out = np.zeros((2 * n, n), dtype=complex)
    for j in range(n):
        if mode == "exact":
            out[:, j] = exact_coin_amplitudes(R[j], sigma[j], lam_bar, Lambda1, OMEGA)
        elif mode == "naive":
            out[:, j] = rescaled_coin_amplitudes(H[j], R[j], pat[j], Lambda1 / (lam_bar * D))
        elif mode == "amplified":
            if plan is None:
                raise ContractError("amplified mode needs a PrepPlan")
            out[:, j] = amplified_coin_amplitudes(H[j], R[j], pat[j], plan)
        else:
            raise ContractError(f"unknown mode {mode!r}")
    return out


def swap(vecs: np.ndarray, m: int) -> np.ndarray:
    """Apply the register swap ``S`` to the columns of ``vecs`` (each of length ``m*m``)."""
    k = vecs.shape[1]
    return vecs.reshape(m, m, k).transpose(1, 0, 2).reshape(m * m, k)


def isometry_from_coins(coins: np.ndarray) -> np.ndarray:
    """``T = sum_j |j,0> (x) |phi_j> <j|`` as a ``(2n)^2 x n`` matrix."""
    m, n = coins.shape
    T = np.zeros((m * m, n), dtype=complex)
    for j in range(n):
        T[(2 * j) * m:(2 * j + 1) * m, j] = coins[:, j]
    return T


@dataclass
class WalkSystem:
    """Isometry, invariant-subspace basis and the walk restricted to it."""

    T: np.ndarray
    basis: np.ndarray
    V: np.ndarray
    lam_bar: float
    Lambda1: float
    mode: str
    plan: PrepPlan | None = None
    omega: int = OMEGA
    coins: np.ndarray = field(repr=False, default=None)

    @property
    def n(self) -> int:
        return self.T.shape[1]

    @property
    def m(self) -> int:
        return 2 * self.n

    def full_walk(self) -> np.ndarray:
        """The walk on the whole ``(2n)^2`` space; only sensible for small ``n``."""
        if self.n > 8:
            raise ContractError("full-space walk is only built for dim <= 8")
        m = self.m
        P = 2.0 * self.T @ self.T.conj().T - np.eye(m * m)
        return 1j * swap(P, m)

    def isometry_full(self) -> np.ndarray:
        """``T`` extended to ancilla-1 inputs by ``|j,1> -> |j,1> (x) |Omega,1>``."""
        m, n = self.m, self.n
        Tf = np.zeros((m * m, m), dtype=complex)
        Tf[:, 0::2] = self.T
        for j in range(n):
            Tf[(2 * j + 1) * m + 2 * self.omega + 1, 2 * j + 1] = 1.0
        return Tf

    def spectrum(self) -> Spectrum:
        return unitary_spectrum(self.V)

    def to_subspace(self, psi: np.ndarray) -> np.ndarray:
        """Coordinates of ``T|psi>`` in the invariant-subspace basis."""
        return self.basis.conj().T @ (self.T @ psi)

    def from_subspace(self, c: np.ndarray) -> np.ndarray:
        """``T^dagger`` applied to the subspace vector with coordinates ``c``."""
        return self.T.conj().T @ (self.basis @ c)


def walk_from_coins(coins: np.ndarray, lam_bar: float, Lambda1: float, mode: str,
                    plan: PrepPlan | None = None) -> WalkSystem:
    m, n = coins.shape
    T = isometry_from_coins(coins)
    ST = swap(T, m)
    B = np.hstack([T, ST])
    U, s, _ = np.linalg.svd(B, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * s[0]))
    Q = U[:, :rank]
    VQ = 1j * swap(2.0 * T @ (T.conj().T @ Q) - Q, m)
    V = Q.conj().T @ VQ
    return WalkSystem(T=T, basis=Q, V=V, lam_bar=lam_bar, Lambda1=Lambda1, mode=mode,
                      plan=plan, coins=coins)


def build_walk(oset: OracleSet, lam_bar: float, mode: str = "exact") -> WalkSystem:
    """Construct the walk for every column through the oracles (charging the ledger)."""
    _check_lam_bar(lam_bar)
    plan = None
    if mode == "amplified":
        plan = choose_r_X(oset.bounds, oset.D, lam_bar)
        plan = column_diagnostics(plan, np.abs(oset.dense()).sum(axis=1))
    coins = np.column_stack([coin_state(oset, j, lam_bar, mode, plan).amplitudes
                             for j in range(oset.dim)])
    return walk_from_coins(coins, lam_bar, oset.bounds.Lambda1, mode, plan)


def effective_hamiltonian(ws: WalkSystem) -> np.ndarray:
    """``H~_jk = <psi_j| S |psi_k>``, i.e. ``T^dagger S T``."""
    return ws.T.conj().T @ swap(ws.T, ws.m)


def walk_coefficient_matrix(Ht) -> np.ndarray:
    """Action of the walk on coefficients ``(a, b)`` of ``T a + S T b``.

    From ``V T = i S T`` and ``V S T = -i T + 2 i S T H~`` one gets the block
    matrix ``[[0, -i], [i, 2 i H~]]``; its eigenvalues are those of the walk on
    the invariant subspace (the basis is not orthonormal, the spectrum is basis
    independent).
    """
    Ht = np.asarray(Ht, dtype=complex)
    n = Ht.shape[0]
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, -1j * I], [1j * I, 2j * Ht]])


def predicted_eigenphases(lam_tilde) -> tuple[np.ndarray, np.ndarray]:
    """``mu_+ = exp(i arcsin lt)`` and ``mu_- = -exp(-i arcsin lt)``."""
    a = np.arcsin(np.clip(np.asarray(lam_tilde, dtype=float), -1.0, 1.0))
    return np.exp(1j * a), -np.exp(-1j * a)


@dataclass(frozen=True)
class SpectrumCheck:
    lam: np.ndarray
    lam_tilde: np.ndarray
    mu_plus: np.ndarray
    mu_minus: np.ndarray
    max_error: float
    degenerate: np.ndarray


def walk_spectrum_check(ws: WalkSystem, H, tol: float = 1e-9) -> SpectrumCheck:
    """Verify that both ``+-exp(+-i arcsin(lam_bar lam / Lambda1))`` occur in ``spec(V)``.

    Eigenvalues with ``|lam~| = 1`` (to 1e-9) are reported but not checked.
    Raises :class:`SpectralMismatchError` naming the first missing eigenvalue.
    """
    if ws.mode != "exact":
        raise ContractError("spectral correspondence is checked for exact-mode walks")
    H = as_matrix(H, hermitian=True)
    lam = np.linalg.eigvalsh(H)
    lt = ws.lam_bar * lam / ws.Lambda1
    mp, mm = predicted_eigenphases(lt)
    ev = ws.spectrum().eigenvalues
    degenerate = np.abs(np.abs(lt) - 1.0) < 1e-9
    worst = 0.0
    for l, a, b, deg in zip(lam, mp, mm, degenerate):
        if deg:
            continue
        ea = float(np.min(np.abs(ev - a)))
        eb = float(np.min(np.abs(ev - b)))
        worst = max(worst, ea, eb)
        if max(ea, eb) > tol:
            raise SpectralMismatchError(
                f"eigenvalue lambda = {l:.12g}: predicted walk eigenvalues missing "
                f"(errors {ea:.2e}, {eb:.2e})")
    return SpectrumCheck(lam, lt, mp, mm, worst, degenerate)


def two_dimensional_blocks(ws: WalkSystem, H) -> float:
    """Largest residual when V is restricted to ``span{T|lam>, S T|lam>}`` per eigenvector.

    Returns ``max_lam || (1 - P_lam) V P_lam ||`` over eigenvectors with ``|lam~| < 1``.
    """
    H = as_matrix(H, hermitian=True)
    w, Q = np.linalg.eigh(effective_hamiltonian(ws))
    worst = 0.0
    for i in range(len(w)):
        if abs(abs(w[i]) - 1.0) < 1e-9:
            continue
        t = ws.T @ Q[:, i]
        B = np.column_stack([t, swap(t[:, None], ws.m)[:, 0]])
        Bq, _ = np.linalg.qr(B)
        c = ws.basis.conj().T @ Bq
        Vc = ws.V @ c
        resid = Vc - c @ (c.conj().T @ Vc)
        worst = max(worst, float(np.linalg.norm(resid, 2)))
    return worst
