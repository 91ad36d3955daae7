"""Black-box access to a matrix and its sparsity pattern, with query accounting.

Indices are 0-based throughout. An :class:`OracleSet` wraps a dense matrix
privately and exposes it only through two black boxes:

* the element oracle ``(j, k) -> H[j, k]`` (called ``O_H``, or ``O_U`` when the
  wrapped matrix is a unitary to be implemented), and
* the sparsity oracle ``(j, k) -> f(j, k)``, the row index of the ``k``-th
  potentially nonzero entry of column ``j`` (called ``O_F``).

Every call increments a :class:`QueryLedger`. Simulation drivers that evaluate
channels in closed form charge the ledger arithmetically with
:meth:`OracleSet.charge`, using the per-call costs documented in
:mod:`walksim.stateprep`. The simulator itself may read the dense matrix
through :meth:`OracleSet.dense` to build reference results; that read is not a
query.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ._errors import ContractError, PreconditionError
from .numerics import as_matrix, is_unitary, norms

NORM_SLACK = 1e-9


@dataclass
class QueryLedger:
    """Counts of element (``OH``/``OU``) and sparsity (``OF``) oracle calls."""

    OH: int = 0
    OF: int = 0
    OU: int = 0

    @property
    def total(self) -> int:
        return self.OH + self.OF + self.OU

    def add(self, OH: int = 0, OF: int = 0, OU: int = 0) -> None:
        if min(OH, OF, OU) < 0:
            raise ContractError("query counts can only increase")
        self.OH += int(OH)
        self.OF += int(OF)
        self.OU += int(OU)

    def merge(self, other: "QueryLedger") -> None:
        self.add(other.OH, other.OF, other.OU)

    def __add__(self, other: "QueryLedger") -> "QueryLedger":
        return QueryLedger(self.OH + other.OH, self.OF + other.OF, self.OU + other.OU)

    def copy(self) -> "QueryLedger":
        return QueryLedger(self.OH, self.OF, self.OU)

    def as_dict(self) -> dict:
        return {"OH": self.OH, "OF": self.OF, "OU": self.OU, "total": self.total}


@dataclass(frozen=True)
class NormBounds:
    """Upper bounds on the spectral norm, max absolute row sum and max entry."""

    Lambda: float
    Lambda1: float
    LambdaMax: float

    def __post_init__(self):
        if min(self.Lambda, self.Lambda1, self.LambdaMax) < 0:
            raise ContractError("norm bounds must be nonnegative")

    @classmethod
    def exact(cls, A) -> "NormBounds":
        n = norms(A)
        return cls(n.spectral, n.max_abs_row_sum, n.max_abs_entry)

    def holds_for(self, A, slack: float = NORM_SLACK) -> bool:
        n = norms(A)
        return (n.spectral <= self.Lambda * (1 + slack) + slack
                and n.max_abs_row_sum <= self.Lambda1 * (1 + slack) + slack
                and n.max_abs_entry <= self.LambdaMax * (1 + slack) + slack)

    def shifted(self, c: float) -> "NormBounds":
        """Bounds valid for ``A + c*I`` given bounds for ``A`` (``c >= 0``)."""
        return NormBounds(self.Lambda + c, self.Lambda1 + c, self.LambdaMax + c)

    def as_dict(self) -> dict:
        return {"Lambda": self.Lambda, "Lambda1": self.Lambda1, "LambdaMax": self.LambdaMax}


def _complete_pattern(A: np.ndarray, pattern: Sequence[Sequence[int]] | None) -> np.ndarray:
    """Return a (dim, D) integer array of row indices per column."""
    n = A.shape[0]
    if pattern is None:
        return np.tile(np.arange(n), (n, 1))
    if len(pattern) != n:
        raise ContractError(f"pattern has {len(pattern)} columns, matrix has {n}")
    cols = [sorted(int(i) for i in col) for col in pattern]
    for j, col in enumerate(cols):
        if len(set(col)) != len(col):
            raise ContractError(f"pattern column {j} repeats a row index")
        if any(i < 0 or i >= n for i in col):
            raise ContractError(f"pattern column {j} has an out-of-range row index")
        missing = set(np.flatnonzero(A[:, j])) - set(col)
        if missing:
            raise ContractError(f"pattern column {j} misses nonzero rows {sorted(missing)}")
    D = max(1, max(len(c) for c in cols))
    out = np.empty((n, D), dtype=int)
    for j, col in enumerate(cols):
        pad = [i for i in range(n) if i not in set(col) and A[i, j] == 0][: D - len(col)]
        if len(col) + len(pad) < D:
            raise ContractError(f"column {j} cannot be padded to {D} distinct zero entries")
        out[j] = sorted(col + pad)
    return out


class OracleSet:
    """Element and sparsity black boxes for one matrix, plus a private ledger."""

    def __init__(self, matrix, pattern: np.ndarray, bounds: NormBounds, *,
                 unitary: bool = False,
                 element: Callable[[int, int], complex] | None = None,
                 ledger: QueryLedger | None = None,
                 counter: str | None = None):
        self._matrix = as_matrix(matrix)
        self._matrix.setflags(write=False)
        self._pattern = np.asarray(pattern, dtype=int)
        self._pattern.setflags(write=False)
        self._element = element
        self.bounds = bounds
        self.unitary = bool(unitary)
        # which ledger field an element query is charged to
        self.counter = counter or ("OU" if unitary else "OH")
        self.ledger = ledger if ledger is not None else QueryLedger()

    # -- construction ------------------------------------------------------

    @classmethod
    def from_dense(cls, H, pattern: Sequence[Sequence[int]] | None = None,
                   bounds: NormBounds | None = None) -> "OracleSet":
        """Wrap a Hermitian matrix; no pattern means ``O_F`` is the identity map."""
        H = as_matrix(H, hermitian=True, name="H")
        pat = _complete_pattern(H, pattern)
        return cls(H, pat, bounds if bounds is not None else NormBounds.exact(H))

    @classmethod
    def from_unitary(cls, U, pattern: Sequence[Sequence[int]] | None = None,
                     bounds: NormBounds | None = None) -> "OracleSet":
        """Wrap a unitary; element queries are charged to ``OU``."""
        U = as_matrix(U, name="U")
        if not is_unitary(U, atol=1e-8):
            raise ContractError("U is not unitary within 1e-8")
        pat = _complete_pattern(U, pattern)
        if bounds is None:
            n = norms(U)
            l1 = max(n.max_abs_row_sum, float(np.abs(U).sum(axis=0).max()))
            bounds = NormBounds(1.0, l1, n.max_abs_entry)
        return cls(U, pat, bounds, unitary=True)

    # -- black boxes -------------------------------------------------------

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def D(self) -> int:
        return self._pattern.shape[1]

    def _check_index(self, j: int, k: int, upper_k: int) -> None:
        if not (0 <= j < self.dim and 0 <= k < upper_k):
            raise ContractError(f"index ({j}, {k}) out of range")

    def query_element(self, j: int, k: int) -> complex:
        """Return the (j, k) entry; every call is charged, zero entries included."""
        self._check_index(j, k, self.dim)
        self.ledger.add(**{self.counter: 1})
        if self._element is not None:
            return complex(self._element(j, k))
        return complex(self._matrix[j, k])

    def query_sparsity(self, j: int, k: int) -> int:
        """Row index of the k-th slot of column j (k < D)."""
        self._check_index(j, k, self.D)
        self.ledger.add(OF=1)
        return int(self._pattern[j, k])

    def charge(self, *, element: int = 0, sparsity: int = 0) -> None:
        """Charge queries performed by a closed-form (arithmetic) simulation."""
        self.ledger.add(**{self.counter: element}, OF=sparsity)

    # -- simulator-side access (never charged) -------------------------------

    def dense(self) -> np.ndarray:
        """Read-only dense copy of the wrapped matrix for reference computations."""
        return self._matrix

    def pattern(self) -> np.ndarray:
        return self._pattern

    def fresh(self) -> "OracleSet":
        """Same black boxes with a new, empty ledger."""
        return OracleSet(self._matrix, self._pattern, self.bounds,
                         unitary=self.unitary, element=self._element, counter=self.counter)

    def with_bounds(self, bounds: NormBounds) -> "OracleSet":
        return OracleSet(self._matrix, self._pattern, bounds, unitary=self.unitary,
                         element=self._element, ledger=self.ledger, counter=self.counter)

    def check_bounds(self) -> None:
        if not self.bounds.holds_for(self._matrix):
            raise PreconditionError(f"norm bounds {self.bounds} do not hold for the wrapped matrix")

    def band_view(self, a: float, b: float, bounds: NormBounds) -> "OracleSet":
        """Oracles for the magnitude band ``a < |H_jk| <= b`` built on top of this set.

        Each band element query performs one parent element query and
        thresholds the answer, so it is charged once (to the parent's counter,
        ``OH`` or ``OU``) on the band's own ledger. The sparsity oracle is the
        parent's.
        """
        A = self._matrix
        mag = np.abs(A)
        mask = (mag > a) & (mag <= b)
        Hb = np.where(mask, A, 0)
        parent = self._matrix

        def element(j, k, _A=parent, _a=a, _b=b):
            v = _A[j, k]
            return v if _a < abs(v) <= _b else 0.0

        return OracleSet(Hb, self._pattern, bounds, unitary=False, element=element,
                         counter=self.counter)


# ---------------------------------------------------------------------------
# pattern file format
# ---------------------------------------------------------------------------

def pattern_to_json(pattern: np.ndarray) -> dict:
    pattern = np.asarray(pattern, dtype=int)
    return {"dim": int(pattern.shape[0]), "D": int(pattern.shape[1]),
            "columns": pattern.tolist()}


def pattern_from_json(obj: dict) -> list[list[int]]:
    try:
        n, D, cols = int(obj["dim"]), int(obj["D"]), obj["columns"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractError(f"malformed pattern object: {exc}") from exc
    if len(cols) != n or any(len(c) > D for c in cols):
        raise ContractError("pattern columns inconsistent with dim/D")
    return [[int(i) for i in c] for c in cols]


def read_pattern(path: str | Path) -> list[list[int]]:
    with open(path, "r", encoding="utf-8") as fh:
        return pattern_from_json(json.load(fh))


def write_pattern(path: str | Path, pattern: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(pattern_to_json(pattern), fh)
        fh.write("\n")


def banded_pattern(n: int, half_width: int) -> list[list[int]]:
    """Pattern of a banded matrix: column j holds rows j-w..j+w inside range."""
    return [list(range(max(0, j - half_width), min(n, j + half_width + 1))) for j in range(n)]
