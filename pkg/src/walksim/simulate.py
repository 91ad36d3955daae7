"""Hamiltonian simulation and unitary implementation channels built on the walk.

The corrected lazy walk
-----------------------
For an eigenvector ``|lam>`` of the effective Hamiltonian with eigenvalue
``lt`` (``|lt| < 1``), ``T|lam>`` has weight 1/2 on each of the two walk
eigenvectors with eigenvalues ``mu_+ = exp(i phi)`` and ``mu_- = -exp(-i phi)``,
``phi = arcsin(lt)``.  One simulation of duration ``t`` with ``d`` steps does:

1. coherent one-bit phase estimation of the walk, which flags ``+`` with
   probability ``(1 + cos(arg mu))/2``;
2. ``V^dagger^d`` on the ``+`` branch and ``(-1)^d V^d`` on the ``-`` branch (the
   sign fixes the parity of ``d``), so the correctly flagged parts of both
   eigenvectors acquire ``exp(-i d phi)``;
3. if ``|lt| d >= 1``, a phase correction ``exp(-i d (lh - arcsin lh))`` driven by
   a phase estimate of the walk with ``d`` applications, ``lh = sin(estimate)``;
4. uncomputation of the flag and of the estimate, and ``T^dagger``.

Everything is coherent, so the net effect on the system is a single
trace-nonincreasing Kraus operator diagonal in the eigenbasis of the effective
Hamiltonian; the missing weight is the failure branch.  The closed form used by
the ``spectral`` backend is, per eigenvalue,

    k = 1/2 sum_{b=+-} [P(+|b) ph(+,b) + P(-|b) ph(-,b)] f_b

with ``f_b`` the expected correction phase for walk eigenvalue ``mu_b``.  The
``statevector`` backend performs steps 1-4 with explicit powers of the walk on
its invariant subspace and serves as an independent check.

Query accounting: each walk step is charged one coin-state preparation and the
initial ``T`` and final ``T^dagger`` one preparation each.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._errors import ContractError, PreconditionError
from .cost import CostEstimate, cost_estimate
from .numerics import (
    DensityOperator,
    as_matrix,
    expm_hermitian,
    hermitian_spectrum,
    is_unitary,
    make_rng,
    norms,
    random_state,
    spectral_norm,
    trace_distance,
    unitary_spectrum,
)
from .oracle import NormBounds, OracleSet, QueryLedger
from .stateprep import amplified_effective_hamiltonian, choose_r_X, column_diagnostics
from .walk import WalkSystem, coin_matrix, walk_from_coins

ESTIMATORS = ("exact_qpe", "gaussian")
SIGN_MODEL = "coherent"
STATEVECTOR_MAX_D = 10_000
STATEVECTOR_MAX_DIM = 16
FEJER_MAX_BINS = 200_000
GAUSS_HERMITE_NODES = 96
INTEGER_TOL = 1e-9


# ---------------------------------------------------------------------------
# primitives
# ---------------------------------------------------------------------------

def sign_probabilities(lam_tilde: float) -> tuple[float, float, float, float]:
    """``(P(+|+), P(-|+), P(+|-), P(-|-))`` of one-bit phase estimation on ``mu_+-``."""
    lt = float(lam_tilde)
    if abs(lt) > 1 + 1e-12:
        raise ContractError(f"|lam_tilde| must be <= 1, got {lt}")
    c = math.sqrt(max(0.0, 1.0 - lt * lt))
    return (1 + c) / 2, (1 - c) / 2, (1 - c) / 2, (1 + c) / 2


@dataclass(frozen=True)
class EstimatorModel:
    """Distribution of the phase estimate used by the arcsin correction.

    ``exact_qpe``: textbook phase estimation with ``applications`` uses of the
    walk; the estimate is ``2 pi m / applications`` with the normalized Fejer
    kernel probabilities.  ``gaussian``: estimate normal around the true phase
    with standard deviation ``pi / applications``.  ``applications=None`` means
    "use the number of walk steps".

    The Fejer kernel has ``1/delta^2`` tails, so its standard deviation is of
    order ``1/sqrt(applications)`` rather than ``1/applications``; with it the
    corrected walk only reaches first-order accuracy in ``lam_bar``.  The
    Gaussian model has exactly the variance ``(pi/d)^2`` the correction step
    relies on and is the default.
    """

    kind: str = "gaussian"
    applications: int | None = None

    def __post_init__(self):
        if self.kind not in ESTIMATORS:
            raise ContractError(f"unknown estimator {self.kind!r}")
        if self.applications is not None and self.applications < 1:
            raise ContractError("applications must be >= 1")

    def resolved(self, d: int) -> "EstimatorModel":
        return self if self.applications is not None else EstimatorModel(self.kind, int(d))


def fejer_weights(phase: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Phase-estimation outcome grid and probabilities for each true phase.

    Returns ``(grid, P)`` with ``grid`` of shape ``(m,)`` and ``P`` of shape
    ``(len(phase), m)``; rows of ``P`` sum to one.  For ``d`` above
    :data:`FEJER_MAX_BINS` only a window of bins around the peak is kept and
    renormalized (the dropped tail mass is below ``1/(pi^2 window/2)``).
    """
    phase = np.atleast_1d(np.asarray(phase, dtype=float))
    if d <= FEJER_MAX_BINS:
        m = np.arange(d)
        grid = 2 * np.pi * m / d
        delta = phase[:, None] - grid[None, :]
        P = _fejer(delta, d)
        return np.broadcast_to(grid, P.shape), P
    half = FEJER_MAX_BINS // 2
    centre = np.round(phase * d / (2 * np.pi)).astype(np.int64)
    m = centre[:, None] + np.arange(-half, half + 1)[None, :]
    grid = 2 * np.pi * m / d
    P = _fejer(phase[:, None] - grid, d)
    P /= P.sum(axis=1, keepdims=True)
    return grid, P


def _fejer(delta: np.ndarray, d: int) -> np.ndarray:
    s = np.sin(delta / 2)
    num = np.sin(d * delta / 2)
    with np.errstate(invalid="ignore", divide="ignore"):
        P = (num / (d * s)) ** 2
    return np.where(np.abs(s) < 1e-14, 1.0, P)


def correction_factors(mu: np.ndarray, d: int, estimator: EstimatorModel) -> np.ndarray:
    """Expected correction phase ``E[exp(-i d (lh - arcsin lh))]`` for each walk eigenvalue."""
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    psi = np.angle(mu)
    est = estimator.resolved(d)
    a = est.applications
    if est.kind == "exact_qpe":
        grid, P = fejer_weights(psi, a)
        lh = np.sin(grid)
        chi = np.exp(-1j * d * (lh - np.arcsin(lh)))
        return np.sum(P * chi, axis=-1)
    x, w = np.polynomial.hermite.hermgauss(GAUSS_HERMITE_NODES)
    sigma = np.pi / a
    est_phase = psi[:, None] + math.sqrt(2) * sigma * x[None, :]
    lh = np.sin(est_phase)
    chi = np.exp(-1j * d * (lh - np.arcsin(lh)))
    return chi @ (w / math.sqrt(math.pi))


def lazy_walk_amplitudes(lam_tilde, d: int, estimator: EstimatorModel | None = None, *,
                         correct: bool = True, parity_fix: bool = True) -> np.ndarray:
    """Closed-form Kraus eigenvalue ``k(lt)`` of the corrected lazy walk for ``d`` steps."""
    est = estimator or EstimatorModel()
    lt = np.atleast_1d(np.asarray(lam_tilde, dtype=float))
    if np.any(np.abs(lt) > 1 + 1e-12):
        raise ContractError("|lam_tilde| must be <= 1")
    lt = np.clip(lt, -1.0, 1.0)
    phi = np.arcsin(lt)
    c = np.sqrt(1.0 - lt ** 2)
    p_right, p_wrong = (1 + c) / 2, (1 - c) / 2
    mu_p, mu_m = np.exp(1j * phi), -np.exp(-1j * phi)
    sgn = (-1.0) ** d if parity_fix else 1.0
    # branch phases ph(s, b): '+' flag applies V^dagger^d, '-' flag applies sgn V^d
    g_p = p_right * np.conj(mu_p) ** d + p_wrong * sgn * mu_p ** d
    g_m = p_wrong * np.conj(mu_m) ** d + p_right * sgn * mu_m ** d
    if correct:
        gate = np.abs(lt) * d >= 1
        f_p = np.ones_like(g_p)
        f_m = np.ones_like(g_m)
        if np.any(gate):
            f_p[gate] = correction_factors(mu_p[gate], d, est)
            f_m[gate] = correction_factors(mu_m[gate], d, est)
        g_p, g_m = g_p * f_p, g_m * f_m
    return 0.5 * (g_p + g_m)


def plain_walk_amplitudes(lam_tilde, d: int) -> np.ndarray:
    """Eigenvalues of ``T^dagger V^d T``: ``(mu_+^d + mu_-^d)/2``."""
    phi = np.arcsin(np.clip(np.asarray(lam_tilde, dtype=float), -1.0, 1.0))
    return 0.5 * (np.exp(1j * d * phi) + (-np.exp(-1j * phi)) ** d)


def kraus_from_amplitudes(Ht, amp_fn) -> np.ndarray:
    """``Q diag(amp_fn(eigs)) Q^dagger`` for the Hermitian effective Hamiltonian ``Ht``."""
    spec = hermitian_spectrum(Ht)
    Q = spec.eigenvectors
    return (Q * amp_fn(spec.eigenvalues)) @ Q.conj().T


def lazy_walk_kraus(Ht, d: int, estimator: EstimatorModel | None = None, **kw) -> np.ndarray:
    return kraus_from_amplitudes(Ht, lambda w: lazy_walk_amplitudes(w, d, estimator, **kw))


def statevector_lazy_walk(ws: WalkSystem, psi: np.ndarray, d: int,
                          estimator: EstimatorModel | None = None, *,
                          correct: bool = True, parity_fix: bool = True) -> np.ndarray:
    """Steps 1-4 of the lazy walk with explicit walk powers on the invariant subspace."""
    if d > STATEVECTOR_MAX_D:
        raise ContractError(f"statevector backend limited to d <= {STATEVECTOR_MAX_D}")
    est = (estimator or EstimatorModel()).resolved(d)
    V = ws.V
    Vh = V.conj().T
    c = ws.to_subspace(np.asarray(psi, dtype=complex))
    plus = 0.5 * (c + V @ c)
    minus = 0.5 * (c - V @ c)
    for _ in range(d):
        plus = Vh @ plus
        minus = V @ minus
    if parity_fix and d % 2:
        minus = -minus
    if correct:
        spec = unitary_spectrum(V)
        mu = spec.eigenvalues
        f = np.ones(len(mu), dtype=complex)
        gate = np.abs(mu.imag) * d >= 1
        if np.any(gate):
            f[gate] = correction_factors(mu[gate], d, est)
        F = (spec.eigenvectors * f) @ spec.eigenvectors.conj().T
        plus, minus = F @ plus, F @ minus
    back = 0.5 * (plus + Vh @ plus) + 0.5 * (minus - Vh @ minus)
    return ws.from_subspace(back)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class SimulationReport:
    output: DensityOperator
    ideal: DensityOperator
    distance: float
    ledger: QueryLedger
    walk_steps: int
    params: dict
    predicted_queries: float | None = None
    predictions: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "distance": float(self.distance),
            "walk_steps": int(self.walk_steps),
            "queries": {"OH": self.ledger.OH, "OF": self.ledger.OF, "OU": self.ledger.OU,
                        "total": self.ledger.total},
            "params": {k: _plain(v) for k, v in self.params.items()},
            "predicted_queries": self.predicted_queries,
            "predictions": {k: _plain(v) for k, v in self.predictions.items()},
            "failure_weight": float(self.output.failure),
            "metadata": {k: _plain(v) for k, v in self.metadata.items()},
        }


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, CostEstimate):
        return v.as_dict()
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _input_state(n: int, psi, seed) -> np.ndarray:
    if psi is None:
        return random_state(n, make_rng(seed))
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape[0] != n:
        raise ContractError(f"input state has length {psi.shape[0]}, expected {n}")
    return psi / np.linalg.norm(psi)


def _report(K: np.ndarray, W: np.ndarray, psi: np.ndarray, **kw) -> SimulationReport:
    out_vec = K @ psi
    weight = float(np.vdot(out_vec, out_vec).real)
    output = DensityOperator(np.outer(out_vec, out_vec.conj()), max(0.0, 1.0 - weight))
    ideal = DensityOperator.pure(W @ psi)
    return SimulationReport(output=output, ideal=ideal,
                            distance=trace_distance(output, ideal), **kw)


def integer_steps(Lambda1: float, t: float, lam_bar: float) -> int:
    """``d = Lambda1 t / lam_bar`` if it is a positive integer, else a precondition error."""
    if not (0.0 < lam_bar <= 1.0):
        raise ContractError(f"lam_bar must lie in (0, 1], got {lam_bar}")
    x = Lambda1 * t / lam_bar
    d = round(x)
    if d < 1 or abs(x - d) > INTEGER_TOL * max(1.0, x):
        nearest = Lambda1 * t / max(1, math.ceil(x - INTEGER_TOL))
        raise PreconditionError(
            f"Lambda1 t / lam_bar = {x:.12g} is not a positive integer; "
            f"nearest admissible lam_bar below is {nearest:.12g}")
    return int(d)


def lazy_walk_bound(H, lam_bar: float, Lambda1: float) -> float:
    """Scale of the lazy-walk error: ``(||H|| lam_bar / Lambda1)^2``."""
    return (spectral_norm(H) * lam_bar / Lambda1) ** 2


# With the Gaussian estimator, |k(lt) - exp(-i d lt)| <= 5.2 lt^2 per eigencomponent
# (dense sweep over 0 < |lt| <= 0.5, 1 <= d <= 10^4; the maximum, 5.18, sits at
# lt d ~ 1 where the correction switches on).  For a sub-normalized output
# a = K psi against b = W psi the trace distance (failure weight included) is at
# most 2 ||a - b||, hence the factor 2.
COMPONENT_CONSTANT = 5.2
LAZY_WALK_CONSTANT = 2 * COMPONENT_CONSTANT


def lazy_walk_channel(H, t: float, lam_bar: float, Lambda1: float,
                      estimator: EstimatorModel | None = None, *,
                      psi=None, seed=0, backend: str = "spectral",
                      correct: bool = True, parity_fix: bool = True,
                      check_bound: bool = True) -> SimulationReport:
    """Simulate ``exp(-i H t)`` with ``d = Lambda1 t / lam_bar`` corrected lazy-walk steps.

    Uses the exact coin states, so the effective Hamiltonian is ``lam_bar H / Lambda1``.
    ``H`` must have a nonnegative diagonal (see :func:`shift_to_nonnegative_diagonal`).
    The report's ``params['C']`` is the constant ``distance / (||H|| lam_bar/Lambda1)^2``;
    with ``check_bound`` (Gaussian estimator only) an error is raised if it exceeds
    :data:`LAZY_WALK_CONSTANT`.
    """
    H = as_matrix(H, hermitian=True)
    n = H.shape[0]
    _require_nonnegative_diagonal(H)
    if Lambda1 < norms(H).max_abs_row_sum * (1 - 1e-12):
        raise PreconditionError("Lambda1 is smaller than the max absolute row sum of H")
    d = integer_steps(Lambda1, t, lam_bar)
    est = (estimator or EstimatorModel()).resolved(d)
    psi = _input_state(n, psi, seed)
    W = expm_hermitian(H, t)
    if backend == "spectral":
        K = lazy_walk_kraus(lam_bar * H / Lambda1, d, est, correct=correct, parity_fix=parity_fix)
        out = K @ psi
    elif backend == "statevector":
        if n > STATEVECTOR_MAX_DIM:
            raise ContractError(f"statevector backend limited to dim <= {STATEVECTOR_MAX_DIM}")
        ws = walk_from_coins(coin_matrix(H, lam_bar, Lambda1, "exact"), lam_bar, Lambda1, "exact")
        out = statevector_lazy_walk(ws, psi, d, est, correct=correct, parity_fix=parity_fix)
    else:
        raise ContractError(f"unknown backend {backend!r}")
    K_eff = np.outer(out, psi.conj())          # rank-one operator reproducing the output
    scale = lazy_walk_bound(H, lam_bar, Lambda1)
    rep = _report(K_eff, W, psi, ledger=QueryLedger(), walk_steps=d,
                  params={"lam_bar": lam_bar, "Lambda1": Lambda1, "t": t, "d": d,
                          "X": None, "r": 0, "eps": None},
                  metadata={"sign_model": SIGN_MODEL, "estimator": est.kind,
                            "estimator_applications": est.applications, "backend": backend,
                            "correct": correct, "parity_fix": parity_fix})
    rep.params["C"] = rep.distance / scale if scale > 0 else 0.0
    rep.params["bound_scale"] = scale
    if (check_bound and correct and parity_fix and est.kind == "gaussian"
            and rep.distance > LAZY_WALK_CONSTANT * scale + 1e-12):
        raise AssertionError(
            f"lazy-walk distance {rep.distance:.3e} exceeds {LAZY_WALK_CONSTANT} * {scale:.3e}")
    return rep


# ---------------------------------------------------------------------------
# diagonal shift
# ---------------------------------------------------------------------------

def _require_nonnegative_diagonal(H: np.ndarray) -> None:
    dmin = float(np.min(np.diag(H).real))
    if dmin < -1e-12 * max(1.0, float(np.max(np.abs(H)))):
        raise PreconditionError(
            f"H has a negative diagonal entry ({dmin:.6g}); the walk encodes |H_jj| on the "
            "diagonal. Use shift_to_nonnegative_diagonal first.")


def shift_to_nonnegative_diagonal(H) -> tuple[np.ndarray, float]:
    """Return ``(H + c I, c)`` with the smallest ``c >= 0`` making the diagonal nonnegative."""
    H = as_matrix(H, hermitian=True)
    c = max(0.0, -float(np.min(np.diag(H).real)))
    if c == 0.0:
        return H, 0.0
    Hs = H + c * np.eye(H.shape[0])
    Hs[np.diag_indices_from(Hs)] = np.maximum(Hs.diagonal().real, 0.0)
    return Hs, c


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SegmentPlan:
    """Parameters chosen by a driver for one simulation of ``H`` over time ``t``."""

    d: int
    lam_bar: float
    X: float | None
    r: int
    shift: float
    bounds: NormBounds
    D: int
    queries_per_prep: int


def theorem1_plan(bounds: NormBounds, D: int, t: float, eps: float, shift: float = 0.0,
                  error_constant: float = LAZY_WALK_CONSTANT) -> SegmentPlan:
    """``d = XDt = max(ceil(Lambda t/sqrt(eps/C)), ceil(LambdaMax D t))``, ``lam_bar = Lambda1 t / d``.

    ``C = error_constant`` is the lazy-walk error constant: the walk error is at
    most ``C (Lambda lam_bar / Lambda1)^2 <= C (Lambda t / d)^2``, so this choice
    of ``d`` keeps it below ``eps``.  ``error_constant=1`` gives the bare formula.
    """
    if not (0 < eps <= 1):
        raise ContractError(f"eps must lie in (0, 1], got {eps}")
    if t <= 0:
        raise ContractError("t must be positive")
    b = bounds.shifted(shift) if shift else bounds
    d = max(_ceil(b.Lambda * t / math.sqrt(eps / error_constant)),
            _ceil(b.LambdaMax * D * t), 1)
    # Lambda1 <= D LambdaMax for true norms; loose bounds could break lam_bar <= 1
    d = max(d, _ceil(b.Lambda1 * t))
    lam_bar = b.Lambda1 * t / d if b.Lambda1 > 0 else 1.0
    X = d / (D * t)
    return SegmentPlan(d=d, lam_bar=lam_bar, X=X, r=0, shift=shift, bounds=b, D=D,
                       queries_per_prep=3)


def lemma6_plan(bounds: NormBounds, D: int, t: float, eps: float, shift: float = 0.0) -> SegmentPlan:
    """``d = ceil(Lambda1 Lambda t^2 / eps)`` (at least ``Lambda1 t``) and amplified preparation."""
    if eps <= 0 or t <= 0:
        raise ContractError("eps and t must be positive")
    b = bounds.shifted(shift) if shift else bounds
    d = max(_ceil(b.Lambda1 * b.Lambda * t * t / eps), _ceil(b.Lambda1 * t), 1)
    lam_bar = b.Lambda1 * t / d if b.Lambda1 > 0 else 1.0
    plan = choose_r_X(b, D, lam_bar) if b.Lambda1 > 0 else None
    r = plan.r if plan else 0
    return SegmentPlan(d=d, lam_bar=lam_bar, X=plan.X if plan else None, r=r, shift=shift,
                       bounds=b, D=D, queries_per_prep=3 * (2 * r + 1))


def _ceil(x: float) -> int:
    return int(math.ceil(x - 1e-12 * max(1.0, abs(x))))


def segment_kraus(H: np.ndarray, t: float, plan: SegmentPlan, prep: str,
                  estimator: EstimatorModel | None = None) -> np.ndarray:
    """Kraus operator approximating ``exp(-i H t)`` for one driver run.

    ``H`` is the unshifted matrix; the driver simulates ``H + shift`` and the
    known global phase ``exp(i shift t)`` is restored.  ``prep`` is
    ``"naive"`` (effective Hamiltonian ``lam_bar H/Lambda1``) or ``"amplified"``
    (the weighted ``H'`` of the amplified preparation).
    """
    n = H.shape[0]
    Hs = H + plan.shift * np.eye(n) if plan.shift else H
    if plan.bounds.Lambda1 == 0:
        return np.eye(n, dtype=complex)
    if prep == "amplified":
        pp = column_diagnostics(choose_r_X(plan.bounds, plan.D, plan.lam_bar),
                                np.abs(Hs).sum(axis=1))
        Ht = amplified_effective_hamiltonian(Hs, pp)
    else:
        Ht = plan.lam_bar * Hs / plan.bounds.Lambda1
    K = lazy_walk_kraus(Ht, plan.d, estimator)
    if plan.shift:
        K = K * np.exp(1j * plan.shift * t)
    return K


def simulate_theorem1(oset: OracleSet, t: float, eps: float, *,
                      estimator: EstimatorModel | None = None, psi=None, seed=0,
                      error_constant: float = LAZY_WALK_CONSTANT) -> SimulationReport:
    """Simulate ``exp(-i H t)`` to trace distance ``eps`` with the naive preparation.

    A negative diagonal is handled by simulating ``H + c I`` (``c`` from the
    diagonal, bounds raised by ``c``) and restoring the global phase.
    """
    H = as_matrix(oset.dense(), hermitian=True)
    _, c = shift_to_nonnegative_diagonal(H)
    plan = theorem1_plan(oset.bounds, oset.D, t, eps, shift=c, error_constant=error_constant)
    K = segment_kraus(H, t, plan, "naive", estimator)
    n_prep = plan.d + 2
    oset.charge(element=2 * n_prep, sparsity=n_prep)
    psi = _input_state(oset.dim, psi, seed)
    b = oset.bounds
    pred = cost_estimate("t1", Lambda=b.Lambda, LambdaMax=b.LambdaMax, D=oset.D, t=t, eps=eps)
    return _report(K, expm_hermitian(H, t), psi, ledger=oset.ledger, walk_steps=plan.d,
                   params={"lam_bar": plan.lam_bar, "X": plan.X, "r": 0, "t": t, "eps": eps,
                           "d": plan.d, "shift": c, "error_constant": error_constant},
                   predicted_queries=pred.value, predictions={"t1": pred},
                   metadata={"sign_model": SIGN_MODEL, "preparation": "naive",
                             "estimator": (estimator or EstimatorModel()).kind})


def simulate_lemma6(oset: OracleSet, t: float, eps: float, *,
                    estimator: EstimatorModel | None = None, psi=None, seed=0) -> SimulationReport:
    """Simulate with the amplitude-amplified preparation and ``lam_bar = Lambda1 t / ceil(Lambda1 Lambda t^2/eps)``."""
    H = as_matrix(oset.dense(), hermitian=True)
    _, c = shift_to_nonnegative_diagonal(H)
    plan = lemma6_plan(oset.bounds, oset.D, t, eps, shift=c)
    K = segment_kraus(H, t, plan, "amplified", estimator)
    n_prep = (plan.d + 2) * (2 * plan.r + 1)
    oset.charge(element=2 * n_prep, sparsity=n_prep)
    psi = _input_state(oset.dim, psi, seed)
    b = oset.bounds
    pred = cost_estimate("lem6", Lambda=b.Lambda, Lambda1=b.Lambda1, LambdaMax=b.LambdaMax,
                         D=oset.D, t=t, eps=eps)
    return _report(K, expm_hermitian(H, t), psi, ledger=oset.ledger, walk_steps=plan.d,
                   params={"lam_bar": plan.lam_bar, "X": plan.X, "r": plan.r, "t": t, "eps": eps,
                           "d": plan.d, "shift": c},
                   predicted_queries=pred.value, predictions={"lem6": pred},
                   metadata={"sign_model": SIGN_MODEL, "preparation": "amplified",
                             "hypothesis_violations": pred.violations,
                             "estimator": (estimator or EstimatorModel()).kind})


# ---------------------------------------------------------------------------
# unitaries
# ---------------------------------------------------------------------------

def embed_unitary(U) -> np.ndarray:
    """``H = [[0, U], [U^dagger, 0]]``; ``H^2 = 1`` and ``exp(-i H pi/2) = -i H``."""
    U = as_matrix(U, name="U")
    if not is_unitary(U, atol=1e-10):
        raise ContractError("U is not unitary within 1e-10")
    N = U.shape[0]
    Z = np.zeros((N, N), dtype=complex)
    return np.block([[Z, U], [U.conj().T, Z]])


def embedding_oracles(uset: OracleSet) -> OracleSet:
    """Oracles for the embedding of ``uset``'s unitary; each element query costs one ``OU``.

    Column ``N + k`` uses the unitary's column pattern, column ``j < N`` the row
    pattern (transpose) shifted into the lower block.
    """
    from .oracle import _complete_pattern

    U = uset.dense()
    N = U.shape[0]
    H = embed_unitary(U)
    cols = [set(int(i) for i in uset.pattern()[k]) for k in range(N)]
    rows = [set() for _ in range(N)]
    for k, s in enumerate(cols):
        for i in s:
            rows[i].add(k)
    pattern = [[N + k for k in sorted(rows[j])] for j in range(N)] + [sorted(s) for s in cols]
    pat = _complete_pattern(H, pattern)

    def element(j, k, _U=U, _N=N):
        if j < _N <= k:
            return _U[j, k - _N]
        if k < _N <= j:
            return np.conj(_U[k, j - _N])
        return 0.0

    b = uset.bounds
    bounds = NormBounds(1.0, b.Lambda1, b.LambdaMax)
    return OracleSet(H, pat, bounds, element=element, ledger=uset.ledger, counter="OU")


def exact_walk_steps(LambdaMax: float, N: int) -> int:
    """Odd ``d = 2 ceil(pi / (4 arcsin(1/(LambdaMax N))) - 1/2) + 1``."""
    a = math.asin(min(1.0, 1.0 / (LambdaMax * N)))
    return 2 * _ceil(math.pi / (4 * a) - 0.5) + 1


def simulate_exact_unitary(uset: OracleSet, *, psi=None, seed=0,
                           backend: str = "spectral") -> SimulationReport:
    """Implement ``U`` exactly with ``d`` plain walk steps on its embedding.

    With ``X = 1/(N sin(pi/2d))`` and ``lam_bar = Lambda1/(N X)`` the effective
    Hamiltonian has eigenvalues ``+-sin(pi/2d)``, so ``V^d`` is ``+-i`` on the two
    sectors and ``T^dagger V^d T = i H = -exp(-i H pi/2)``.  The input is
    ``|1>|psi>`` (lower block), the ideal output ``-i |0> U|psi>``.
    """
    N = uset.dim
    b = uset.bounds
    if b.LambdaMax < norms(uset.dense()).max_abs_entry * (1 - 1e-12):
        raise PreconditionError("LambdaMax is smaller than the largest entry magnitude of U")
    d = exact_walk_steps(b.LambdaMax, N)
    X = 1.0 / (N * math.sin(math.pi / (2 * d)))
    lam_bar = b.Lambda1 / (N * X)
    hset = embedding_oracles(uset)
    H = hset.dense()
    phi = math.asin(lam_bar / b.Lambda1)
    mu_p, mu_m = np.exp(1j * phi), -np.exp(-1j * phi)
    sub = _input_state(N, psi, seed)
    full_in = np.concatenate([np.zeros(N, dtype=complex), sub])
    metadata = {"sign_model": "none (plain walk)", "backend": backend}
    if backend == "spectral":
        K = kraus_from_amplitudes(lam_bar * H / b.Lambda1, lambda w: plain_walk_amplitudes(w, d))
        out = K @ full_in
        Vd_eigs = np.concatenate([[mu_p ** d, mu_m ** d], [np.conj(mu_p) ** d, np.conj(mu_m) ** d]])
    elif backend == "statevector":
        ws = walk_from_coins(coin_matrix(H, lam_bar, b.Lambda1, "naive", pattern=hset.pattern()),
                             lam_bar, b.Lambda1, "naive")
        Vd = np.linalg.matrix_power(ws.V, d)
        out = ws.from_subspace(Vd @ ws.to_subspace(full_in))
        Vd_eigs = unitary_spectrum(Vd).eigenvalues
    else:
        raise ContractError(f"unknown backend {backend!r}")
    n_prep = d + 2
    hset.charge(element=2 * n_prep, sparsity=n_prep)
    W = expm_hermitian(H, math.pi / 2)
    K_eff = np.outer(out, full_in.conj())
    rep = _report(K_eff, W, full_in, ledger=uset.ledger, walk_steps=d,
                  params={"lam_bar": lam_bar, "X": X, "r": 0, "t": math.pi / 2, "eps": 0.0, "d": d},
                  metadata=metadata)
    ideal_vec = W @ full_in
    ov = np.vdot(ideal_vec, out)
    rep.metadata["global_phase"] = complex(ov / abs(ov)) if abs(ov) > 0 else complex(0)
    rep.metadata["Vd_eigenvalue_error"] = float(np.max(np.minimum(np.abs(Vd_eigs - 1j),
                                                                  np.abs(Vd_eigs + 1j))))
    pred = cost_estimate("exact", N=N, LambdaMax=b.LambdaMax)
    rep.predicted_queries = pred.value
    rep.predictions = {"exact": pred}
    return rep


def implement_unitary(uset: OracleSet, method: str = "exact_walk", eps: float = 0.01, *,
                      psi=None, seed=0, estimator: EstimatorModel | None = None) -> SimulationReport:
    """Implement ``U`` by simulating its embedding for time ``pi/2``.

    Methods: ``exact_walk`` (no error), ``theorem1`` (naive preparation),
    ``lemma6`` (amplified preparation) and ``decomposed`` (magnitude bands with
    the large-norm schedule).  The returned state is the full embedding output;
    ``params['implemented']`` holds the upper block, which should equal
    ``-i U|psi>``.
    """
    N = uset.dim
    b = uset.bounds
    if method == "exact_walk":
        rep = simulate_exact_unitary(uset, psi=psi, seed=seed)
    else:
        if not (0 < eps <= 1):
            raise ContractError("eps must lie in (0, 1]")
        hset = embedding_oracles(uset)
        sub = _input_state(N, psi, seed)
        full_in = np.concatenate([np.zeros(N, dtype=complex), sub])
        t = math.pi / 2
        if method == "theorem1":
            rep = simulate_theorem1(hset, t, eps, estimator=estimator, psi=full_in)
        elif method == "lemma6":
            rep = simulate_lemma6(hset, t, eps, estimator=estimator, psi=full_in)
        elif method == "decomposed":
            if not (eps * N > math.pi / 2):
                raise PreconditionError(f"the decomposed method needs eps N > pi/2 (eps N = {eps * N:.4g})")
            from .decompose import large_norm_schedule, simulate_decomposed
            sched = large_norm_schedule(hset.bounds, hset.D, t, eps)
            rep = simulate_decomposed(hset, sched, t, eps, estimator=estimator, psi=full_in)
            rep.ledger = uset.ledger
        else:
            raise ContractError(f"unknown method {method!r}")
        rep.predictions["corr11"] = cost_estimate("corr11", LambdaMax=b.LambdaMax, N=N,
                                                  Lambda1=b.Lambda1, eps=eps)
        rep.predictions["cor1"] = cost_estimate("cor1", N=N, eps=eps)
        if method == "lemma6":
            rep.predicted_queries = rep.predictions["corr11"].value
        elif method == "decomposed":
            rep.predicted_queries = rep.predictions["cor1"].value
    vec = _dominant_vector(rep.output)
    rep.metadata["method"] = method
    rep.params["implemented_block"] = "upper"
    rep.metadata["output_upper_block_weight"] = float(np.sum(np.abs(vec[:N]) ** 2))
    return rep


def _dominant_vector(rho: DensityOperator) -> np.ndarray:
    w, Q = np.linalg.eigh(rho.matrix)
    return Q[:, -1] * math.sqrt(max(w[-1], 0.0))


# ---------------------------------------------------------------------------
# builtin unitaries
# ---------------------------------------------------------------------------

def qft_matrix(N: int) -> np.ndarray:
    j = np.arange(N)
    return np.exp(2j * np.pi * np.outer(j, j) / N) / math.sqrt(N)


def search_unitary(N: int, marked: int) -> np.ndarray:
    """``U_jk = g((j + k) mod N)`` with ``g`` marking one item; ``U|0> = |marked>``."""
    if not (0 <= marked < N):
        raise ContractError("marked item out of range")
    j = np.arange(N)
    return ((j[:, None] + j[None, :]) % N == marked).astype(complex)


def permutation_unitary(perm) -> np.ndarray:
    perm = np.asarray(perm, dtype=int)
    N = len(perm)
    if sorted(perm.tolist()) != list(range(N)):
        raise ContractError("not a permutation")
    P = np.zeros((N, N), dtype=complex)
    P[perm, np.arange(N)] = 1.0
    return P


def spin_rotation(J: float) -> np.ndarray:
    """``exp(-i pi J_x / 2)`` in the ``J_z`` basis ``m = J, J-1, ..., -J``."""
    twoJ = round(2 * J)
    if twoJ < 0 or abs(2 * J - twoJ) > 1e-12:
        raise ContractError("2J must be a nonnegative integer")
    m = J - np.arange(twoJ + 1)
    # <m+1| J_+ |m> = sqrt(J(J+1) - m(m+1))
    up = np.sqrt(np.maximum(J * (J + 1) - m[1:] * (m[1:] + 1), 0.0))
    Jx = np.zeros((twoJ + 1, twoJ + 1))
    idx = np.arange(twoJ)
    Jx[idx, idx + 1] = up / 2
    Jx[idx + 1, idx] = up / 2
    return expm_hermitian(Jx, math.pi / 2)


def spin_max_entry_formula(J: float) -> float:
    """``sqrt((2 cJ)!) / (2^cJ cJ!)`` with ``cJ = ceil(J)``."""
    c = math.ceil(J - 1e-12)
    return math.exp(0.5 * math.lgamma(2 * c + 1) - c * math.log(2) - math.lgamma(c + 1))
