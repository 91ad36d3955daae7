"""Symmetric product formulas (Strang and its Suzuki recursion).

A :class:`TrotterSequence` is an ordered list of ``(term, duration)`` pairs;
the evolution it describes applies the first pair first.  Durations may be
negative (the fourth-order recursion has one backward step), in which case the
term is evolved under ``-H`` for ``|duration|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .._errors import ContractError, UnsupportedOrderError
from ..numerics import expm_hermitian

DURATION_TOL = 1e-12


def suzuki_coefficient(K: int) -> float:
    """``p_K = 1/(4 - 4^{1/(2K-1)})``; ``p_2 = 1/(4 - 4^{1/3})``."""
    if K < 2:
        raise ContractError("the recursion coefficient is defined for K >= 2")
    return 1.0 / (4.0 - 4.0 ** (1.0 / (2 * K - 1)))


P2 = suzuki_coefficient(2)


@dataclass(frozen=True)
class TrotterSequence:
    segments: tuple[tuple[int, float], ...]
    terms: int

    def __post_init__(self):
        for term, _ in self.segments:
            if not (0 <= term < self.terms):
                raise ContractError(f"term index {term} out of range for {self.terms} terms")

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def durations_per_term(self) -> np.ndarray:
        out = np.zeros(self.terms)
        for term, s in self.segments:
            out[term] += s
        return out

    @property
    def duration(self) -> float:
        """Evolution time: the common per-term duration sum."""
        per = self.durations_per_term()
        if per.size and np.ptp(per) > DURATION_TOL * max(1.0, float(np.max(np.abs(per)))):
            raise ContractError(f"terms are evolved for unequal times {per}")
        return float(per[0]) if per.size else 0.0

    def repeat(self, m: int) -> "TrotterSequence":
        if m < 0:
            raise ContractError("repeat count must be nonnegative")
        return TrotterSequence(self.segments * m, self.terms)

    def merged(self) -> "TrotterSequence":
        """Fuse adjacent same-sign segments of the same term; drop zero-length ones.

        Opposite-sign neighbours are kept apart: fusing them would create a
        segment shorter than either, below the step sizes a schedule guarantees.
        """
        out: list[list] = []
        for term, s in self.segments:
            if out and out[-1][0] == term and (out[-1][1] > 0) == (s > 0):
                out[-1][1] += s
            else:
                out.append([term, s])
        keep = tuple((t, s) for t, s in out if abs(s) > DURATION_TOL)
        return TrotterSequence(keep, self.terms)

    def substitute(self, term: int, inner: "TrotterSequence", offset: int) -> "TrotterSequence":
        """Replace every segment of ``term`` (duration ``s``) by ``inner`` scaled to time ``s``.

        ``inner``'s term ``i`` becomes term ``offset + i`` of the result.
        """
        base = inner.duration
        if base == 0:
            raise ContractError("inner sequence has zero duration")
        segs = []
        for t, s in self.segments:
            if t == term:
                segs.extend((offset + i, d * s / base) for i, d in inner.segments)
            else:
                segs.append((t, s))
        return TrotterSequence(tuple(segs), max(self.terms, offset + inner.terms))

    def product(self, evolve: Callable[[int, float], np.ndarray]) -> np.ndarray:
        """``evolve(term_k, s_k) ... evolve(term_1, s_1)`` (first segment acts first)."""
        U = None
        cache: dict[tuple[int, float], np.ndarray] = {}
        for term, s in self.segments:
            key = (term, s)
            if key not in cache:
                cache[key] = evolve(term, s)
            U = cache[key] if U is None else cache[key] @ U
        if U is None:
            raise ContractError("empty sequence")
        return U

    def exact_product(self, hamiltonians: Sequence[np.ndarray]) -> np.ndarray:
        """Product of exact exponentials ``exp(-i H_term s)``."""
        if len(hamiltonians) != self.terms:
            raise ContractError(f"need {self.terms} Hamiltonians, got {len(hamiltonians)}")
        return self.product(lambda k, s: expm_hermitian(hamiltonians[k], s))


def strang(terms: int, tau: float) -> TrotterSequence:
    """``e^{-iH_0 tau/2} ... e^{-iH_{m-1} tau} ... e^{-iH_0 tau/2}`` (second order)."""
    if terms < 1:
        raise ContractError("need at least one term")
    if terms == 1:
        return TrotterSequence(((0, tau),), 1)
    half = [(k, tau / 2) for k in range(terms - 1)]
    segs = half + [(terms - 1, tau)] + half[::-1]
    return TrotterSequence(tuple(segs), terms)


def suzuki_sequence(K: int, terms: int, tau: float) -> TrotterSequence:
    """Order-``2K`` symmetric product formula over one interval ``tau``.

    ``K = 1`` is the Strang splitting; ``K >= 2`` applies the five-part
    recursion ``S(p tau)^2 S((1-4p) tau) S(p tau)^2`` with ``p = p_K`` to the
    order-``2K-2`` formula.  Adjacent segments are not fused (see
    :meth:`TrotterSequence.merged`).
    """
    if not isinstance(K, (int, np.integer)) or K < 1:
        raise UnsupportedOrderError(f"product-formula order K must be an integer >= 1, got {K!r}")
    if not math.isfinite(tau):
        raise ContractError("tau must be finite")
    if K == 1:
        return strang(terms, tau)
    p = suzuki_coefficient(K)
    outer = suzuki_sequence(K - 1, terms, p * tau)
    middle = suzuki_sequence(K - 1, terms, (1 - 4 * p) * tau)
    segs = outer.segments * 2 + middle.segments + outer.segments * 2
    return TrotterSequence(segs, terms)
