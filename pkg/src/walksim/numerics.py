"""Dense complex linear algebra used throughout the package.

Everything here is a pure function of its inputs: eigendecompositions,
Hermitian matrix exponentials, the three matrix norms that parametrize the
simulation algorithms, trace distance between (possibly sub-normalized)
density operators, seeded random ensembles and the JSON matrix format.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

from ._errors import ContractError

HERMITIAN_ATOL = 1e-12


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def as_matrix(A, *, hermitian: bool = False, name: str = "matrix") -> np.ndarray:
    """Return ``A`` as a square complex128 array, checking the structural contract.

    With ``hermitian=True`` the input must equal its conjugate transpose to
    within ``1e-12`` (relative to its largest entry when that exceeds one).
    """
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ContractError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ContractError(f"{name} contains NaN or Inf entries")
    if hermitian and not is_hermitian(M):
        raise ContractError(f"{name} is not Hermitian")
    return M


def is_hermitian(A: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(A), initial=0.0)))
    return bool(np.allclose(A, A.conj().T, rtol=0.0, atol=atol * scale))


def is_unitary(U: np.ndarray, atol: float = 1e-10) -> bool:
    U = np.asarray(U, dtype=complex)
    return bool(np.allclose(U.conj().T @ U, np.eye(U.shape[0]), rtol=0.0, atol=atol))


# ---------------------------------------------------------------------------
# spectra and exponentials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues with orthonormal eigenvectors stored as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.conj().T


def hermitian_spectrum(H) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix (LAPACK tridiagonal path)."""
    H = as_matrix(H, hermitian=True)
    w, Q = np.linalg.eigh(H)
    return Spectrum(w, Q)


def unitary_spectrum(U) -> Spectrum:
    """Eigendecomposition of a unitary (normal) matrix via the complex Schur form.

    For a normal matrix the Schur factor is diagonal, so the Schur vectors are
    an orthonormal eigenbasis even when eigenvalues are degenerate.
    """
    U = as_matrix(U, name="unitary")
    T, Z = scipy.linalg.schur(U, output="complex")
    return Spectrum(np.diag(T).copy(), Z)


def expm_hermitian(H, t: float) -> np.ndarray:
    """Return ``exp(-i H t)`` for Hermitian ``H`` via its eigendecomposition."""
    spec = hermitian_spectrum(H)
    Q = spec.eigenvectors
    return (Q * np.exp(-1j * t * spec.eigenvalues)) @ Q.conj().T


def function_of_hermitian(H, f) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    spec = hermitian_spectrum(H)
    Q = spec.eigenvectors
    return (Q * f(spec.eigenvalues)) @ Q.conj().T


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

class Norms(NamedTuple):
    spectral: float
    max_abs_row_sum: float
    max_abs_entry: float


def spectral_norm(A) -> float:
    A = np.asarray(A, dtype=complex)
    if A.size == 0 or not np.any(A):
        return 0.0
    return float(np.linalg.norm(A, 2))


def norms(A) -> Norms:
    """Spectral norm, maximum absolute row sum and maximum entry magnitude."""
    A = as_matrix(A)
    absA = np.abs(A)
    return Norms(spectral_norm(A), float(absA.sum(axis=1).max()), float(absA.max()))


# ---------------------------------------------------------------------------
# states and trace distance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityOperator:
    """A density matrix, possibly sub-normalized by an explicit failure branch.

    ``failure`` is the probability mass that left the computational subspace
    (for instance an ancilla flagged as failed). It is treated as an extra
    orthogonal outcome so that ``trace(matrix) + failure == 1``.
    """

    matrix: np.ndarray
    failure: float = 0.0

    def __post_init__(self):
        M = as_matrix(self.matrix, hermitian=True, name="density matrix")
        object.__setattr__(self, "matrix", M)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def check(self, atol: float = 1e-10) -> None:
        w = np.linalg.eigvalsh(self.matrix)
        if w.min() < -1e-12 * max(1.0, w.max()) - 1e-12:
            raise ContractError(f"density matrix has negative eigenvalue {w.min():.3e}")
        if abs(self.trace + self.failure - 1.0) > atol:
            raise ContractError(f"trace {self.trace} + failure {self.failure} != 1")

    @classmethod
    def pure(cls, psi) -> "DensityOperator":
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        return cls(np.outer(psi, psi.conj()), 0.0)

    @classmethod
    def from_kraus(cls, K: np.ndarray, rho: "DensityOperator") -> "DensityOperator":
        """Apply a single trace-nonincreasing Kraus operator; lost weight is failure."""
        out = K @ rho.matrix @ K.conj().T
        out = 0.5 * (out + out.conj().T)
        lost = rho.trace - float(np.real(np.trace(out)))
        return cls(out, rho.failure + max(lost, 0.0))

    def mix(self, other: "DensityOperator", p: float) -> "DensityOperator":
        return DensityOperator(p * self.matrix + (1 - p) * other.matrix,
                               p * self.failure + (1 - p) * other.failure)


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Half the trace norm of ``rho - sigma``, failure branches included.

    Both failure weights are regarded as populations of one extra orthogonal
    outcome, so they contribute ``|f_rho - f_sigma| / 2``.
    """
    if rho.dim != sigma.dim:
        raise ContractError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    diff = rho.matrix - sigma.matrix
    s = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    d = 0.5 * float(np.abs(s).sum()) + 0.5 * abs(rho.failure - sigma.failure)
    return min(max(d, 0.0), 1.0)


# ---------------------------------------------------------------------------
# random numbers and ensembles
# ---------------------------------------------------------------------------

def make_rng(seed) -> np.random.Generator:
    """Counter-based (Philox) generator; ``seed`` may be an int or a SeedSequence."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(ss))


def spawn_seeds(seed, n: int) -> list[np.random.SeedSequence]:
    """Independent child seed sequences, stable for a given parent seed."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return ss.spawn(n)


def gaussian_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    """GUE sample: off-diagonal real/imaginary parts of variance 1/2, real diagonal of variance 1."""
    G = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    H = (G + G.conj().T) / np.sqrt(2)
    return 0.5 * (H + H.conj().T)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a Ginibre matrix."""
    Z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_ensembles(kind: str, dim: int, seed) -> np.ndarray:
    """Draw one matrix from ``gaussian_hermitian`` or ``haar_unitary``."""
    if dim < 1:
        raise ContractError("dim must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    if kind == "gaussian_hermitian":
        return gaussian_hermitian(dim, rng)
    if kind == "haar_unitary":
        return haar_unitary(dim, rng)
    raise ContractError(f"unknown ensemble {kind!r}")


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state vector."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# matrix file format
# ---------------------------------------------------------------------------

def matrix_to_json(A) -> dict:
    A = as_matrix(A)
    return {"dim": int(A.shape[0]),
            "entries": [[float(z.real), float(z.imag)] for z in A.reshape(-1)]}


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        n = int(obj["dim"])
        entries = np.asarray(obj["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractError(f"malformed matrix object: {exc}") from exc
    if entries.shape != (n * n, 2):
        raise ContractError(f"expected {n * n} [re, im] pairs, got array of shape {entries.shape}")
    return as_matrix((entries[:, 0] + 1j * entries[:, 1]).reshape(n, n))


def read_matrix(path: str | Path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return matrix_from_json(json.load(fh))


def write_matrix(path: str | Path, A) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(matrix_to_json(A), fh)
        fh.write("\n")


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])
