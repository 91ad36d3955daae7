"""Run a band schedule: one walk simulation per product-formula segment."""
from __future__ import annotations

import numpy as np

from .._errors import ContractError
from ..cost import cost_estimate
from ..numerics import as_matrix, expm_hermitian
from ..oracle import NormBounds, OracleSet, QueryLedger
from ..simulate import (SIGN_MODEL, EstimatorModel, SimulationReport, _input_state, _report,
                        lemma6_plan, segment_kraus, shift_to_nonnegative_diagonal,
                        simulate_theorem1, theorem1_plan)
from .bands import partition


def _segment(H: np.ndarray, s: float, bounds: NormBounds, D: int, eps_s: float, driver: str,
             estimator: EstimatorModel | None) -> tuple[np.ndarray, int, int]:
    """Kraus operator, walk steps and basic preparations of one band run over signed duration ``s``."""
    Hs = -H if s < 0 else H
    dur = abs(s)
    _, c = shift_to_nonnegative_diagonal(Hs)
    if driver == "lemma6":
        plan = lemma6_plan(bounds, D, dur, eps_s, shift=c)
        K = segment_kraus(Hs, dur, plan, "amplified", estimator)
    else:
        plan = theorem1_plan(bounds, D, dur, min(eps_s, 1.0), shift=c)
        K = segment_kraus(Hs, dur, plan, "naive", estimator)
    return K, plan.d, (plan.d + 2) * (2 * plan.r + 1)


def simulate_decomposed(oset: OracleSet, schedule, t: float | None = None, eps: float | None = None, *,
                        estimator: EstimatorModel | None = None, psi=None, seed=0) -> SimulationReport:
    """Simulate ``exp(-i H t)`` by walking the schedule's product formula.

    Each segment simulates one band with the driver the schedule assigns to it.
    Band element queries go through the parent element oracle and threshold
    the answer, so each is charged once to that band's ledger; all band
    ledgers are merged into ``oset.ledger`` at the end.  Bands that are
    identically zero contribute the identity and are skipped.  When only one
    nonzero band remains, or the schedule itself is the unbanded fallback, the
    result is a plain naive-walk simulation of ``H``.
    """
    t = schedule.t if t is None else t
    eps = schedule.eps if eps is None else eps
    if abs(t - schedule.t) > 1e-12 * max(1.0, t) or abs(eps - schedule.eps) > 1e-15:
        raise ContractError("schedule was built for different t or eps")
    H = as_matrix(oset.dense(), hermitian=True)
    psi = _input_state(oset.dim, psi, seed)
    bands = partition(H, schedule.cutoffs[:schedule.L]) if schedule.kind != "theorem1" else []
    nonzero = [i for i, b in enumerate(bands) if not b.is_zero]
    if schedule.kind == "theorem1" or len(nonzero) <= 1:
        rep = simulate_theorem1(oset, t, eps, estimator=estimator, psi=psi)
        rep.metadata["schedule"] = schedule.kind
        rep.metadata["decomposition"] = ("unbanded fallback: " + schedule.fallback
                                         if schedule.kind == "theorem1"
                                         else "single nonzero band; ran unbanded")
        return rep

    band_sets = [oset.band_view(b.a, b.b, schedule.band_bounds[i]) for i, b in enumerate(bands)]
    seq = schedule.sequence()
    kraus_cache: dict[tuple[int, float], tuple] = {}
    K = np.eye(oset.dim, dtype=complex)
    steps = 0
    segments = 0
    for term, s in seq:
        if term not in nonzero:
            continue
        key = (term, s)
        if key not in kraus_cache:
            kraus_cache[key] = _segment(bands[term].matrix, s, schedule.band_bounds[term], oset.D,
                                        schedule.segment_eps(s), schedule.drivers[term], estimator)
        Kseg, d, n_prep = kraus_cache[key]
        band_sets[term].charge(element=2 * n_prep, sparsity=n_prep)
        K = Kseg @ K
        steps += d
        segments += 1
    total = QueryLedger()
    for bs in band_sets:
        total.merge(bs.ledger)
    oset.ledger.merge(total)

    b = oset.bounds
    preds = {}
    if schedule.kind == "small_norm":
        preds["sm"] = cost_estimate("sm", Lambda=b.Lambda, D=oset.D, t=t, eps=eps, zeta=schedule.zeta)
        preds["sm_L"] = cost_estimate("sm", Lambda=b.Lambda, D=oset.D, t=t, eps=eps,
                                      zeta=schedule.zeta, L=schedule.L)
        main = preds["sm"]
    else:
        preds["t2"] = cost_estimate("t2", Lambda=b.Lambda, D=oset.D, t=t, eps=eps)
        main = preds["t2"]
    return _report(K, expm_hermitian(H, t), psi, ledger=oset.ledger, walk_steps=steps,
                   params={"t": t, "eps": eps, "L": schedule.L, "segments": segments,
                           "band_queries": [bs.ledger.as_dict() for bs in band_sets]},
                   predicted_queries=main.value, predictions=preds,
                   metadata={"sign_model": SIGN_MODEL, "schedule": schedule.kind,
                             "nesting": schedule.nesting, "dropped_bands":
                             [i for i in range(len(bands)) if i not in nonzero],
                             "estimator": (estimator or EstimatorModel()).kind})

