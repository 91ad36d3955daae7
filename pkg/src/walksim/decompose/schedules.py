"""Band schedules: cutoffs, per-band bounds, time steps and error budgets.

Two constructions split ``H`` into magnitude bands ``H_0, ..., H_{L-1}`` (band
``i`` holds the entries in ``(A_{i+1}, A_i]``, the last band everything below
``A_{L-1}``) and recombine the band evolutions with product formulas.

*Small norm* (the band norms are controlled by ``zeta >= brk(H)``): geometric
cutoffs ``A_l = Lambda D^{-l/2L}``, one Strang splitting over all bands, every
band simulated with the amplitude-amplified walk.

*Large norm*: cutoffs ``A_{L-k} = Lambda / Gamma^{1/3 - (3 2^{k-1} - 2) xi}``; a
Strang splitting of ``H_0`` against the rest, the rest (for ``L >= 3``) combined
by a fourth-order formula.  The lowest band is simulated with the naive walk,
the others with the amplified walk.

Either construction falls back to a single naive-walk simulation of ``H``
when banding cannot pay off; the schedule then has ``kind == "theorem1"`` and
``fallback`` explains why.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .._errors import ContractError, HypothesisError
from ..oracle import NormBounds
from .trotter import P2, TrotterSequence, strang, suzuki_sequence

REL = 1e-12
DEFAULT_L_RULE = "max(2, ceil(log2 D))"


def _floor(x: float) -> int:
    return int(math.floor(x + REL * max(1.0, abs(x))))


def _check_hypothesis(bounds: NormBounds, D: int, t: float, eps: float) -> None:
    Lt = bounds.Lambda * t
    if not (0 < eps <= 1):
        raise ContractError(f"eps must lie in (0, 1], got {eps}")
    if t <= 0:
        raise ContractError("t must be positive")
    if not (eps * D > Lt):
        raise HypothesisError(f"eps D > Lambda t fails: {eps * D:.6g} <= {Lt:.6g}")
    if not (Lt > math.sqrt(eps)):
        raise HypothesisError(f"Lambda t > sqrt(eps) fails: {Lt:.6g} <= {math.sqrt(eps):.6g}")


@dataclass(frozen=True)
class BandSchedule:
    """Everything needed to run a banded simulation of one ``H`` over time ``t``.

    ``cutoffs`` holds ``A_0 .. A_L`` (``A_L`` is a bookkeeping value not used to
    split entries).  ``tau[i]`` is the shortest duration any segment of band ``i``
    is simulated for; ``eps_per_band[i]`` the error budget of that segment.
    Per-segment budgets scale with segment length: ``eps_s = eps_rate * |s|``.
    """

    kind: str                       # "small_norm", "large_norm" or "theorem1"
    t: float
    eps: float
    D: int
    L: int
    cutoffs: tuple[float, ...]
    band_bounds: tuple[NormBounds, ...]
    drivers: tuple[str, ...]        # "lemma6" or "theorem1" per band
    tau: tuple[float, ...]
    eps_per_band: tuple[float, ...]
    eps_rate: float
    K: tuple[int, ...]              # integrator order per nesting level
    nesting: str
    interval: float                 # outer Strang interval (2 tau_1)
    Gamma: float | None = None
    xi: float | None = None
    nu: int | None = None
    zeta: float | None = None
    fallback: str | None = None
    bounds: NormBounds | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    # -- execution sequence --------------------------------------------------

    def sequence(self) -> TrotterSequence:
        """The full product formula over ``[0, t]`` (adjacent pieces fused)."""
        if self.kind == "theorem1":
            return TrotterSequence(((0, self.t),), 1)
        reps = round(self.t / self.interval)
        if self.kind == "small_norm" or self.L == 2:
            return strang(self.L, self.interval).repeat(reps).merged()
        inner = suzuki_sequence(2, self.L - 1, self.interval / (2 * self.nu)).repeat(2 * self.nu)
        outer = strang(2, self.interval).substitute(1, inner, offset=1)
        return TrotterSequence(outer.segments, self.L).repeat(reps).merged()

    def segment_eps(self, duration: float) -> float:
        return self.eps_rate * abs(duration)

    # -- checks ----------------------------------------------------------------

    def check_invariants(self) -> dict[str, bool]:
        """Evaluate every structural invariant; raise ``AssertionError`` on failure."""
        out: dict[str, bool] = {}
        A = self.cutoffs
        Lam = self.bounds.Lambda
        out["A0_equals_Lambda"] = abs(A[0] - Lam) <= REL * Lam
        out["cutoffs_decreasing"] = all(A[i + 1] < A[i] for i in range(len(A) - 1))
        if self.kind == "theorem1":
            for k, v in out.items():
                if not v:
                    raise AssertionError(f"schedule invariant {k} fails")
            return out
        ratio = self.t / self.interval
        out["t_over_tau1_even"] = abs(2 * ratio - round(2 * ratio)) < 1e-9 and round(2 * ratio) % 2 == 0
        if self.kind == "small_norm":
            out["A_L_is_Lambda_over_sqrtD"] = abs(A[-1] - Lam / math.sqrt(self.D)) <= 1e-9 * Lam
            r = [A[i] / A[i + 1] for i in range(len(A) - 1)]
            out["constant_ratios"] = max(r) - min(r) <= 1e-9 * max(r)
        else:
            if self.L >= 3:
                out["nu_positive"] = self.nu is not None and self.nu >= 1
            out["Gamma_xi_at_most_e"] = self.Gamma ** self.xi <= math.e * (1 + REL)
            target = self.Gamma ** (1 / 3 + 2 * self.xi) / Lam
            out["ratio_identity"] = all(
                abs(A[l - 1] / A[l] ** 2 - target) <= 1e-9 * target for l in range(1, self.L + 1))
        out["lemma6_time_steps"] = all(self._lemma6_ok(i) for i in range(self.L)
                                       if self.drivers[i] == "lemma6")
        for k, v in out.items():
            if not v:
                raise AssertionError(f"schedule invariant {k} fails")
        return out

    def _lemma6_ok(self, i: int) -> bool:
        """``tau_i >= max{eps/(c L Lambda_i^2 t), Lambda_i/(LambdaMax_i Lambda1_i D)}``."""
        b = self.band_bounds[i]
        tau = self.tau[i]
        c = math.sqrt(self.L) if self.kind == "small_norm" else 1.0
        lower1 = self.eps / (c * self.L * b.Lambda ** 2 * self.t)
        lower2 = b.Lambda / (b.LambdaMax * b.Lambda1 * self.D)
        return tau >= max(lower1, lower2) * (1 - 1e-9)

    # -- output ---------------------------------------------------------------

    def as_dict(self) -> dict:
        return {
            "kind": self.kind, "L": self.L, "cutoffs": list(self.cutoffs),
            "tau": list(self.tau), "eps_per_band": list(self.eps_per_band),
            "K": list(self.K), "nesting": self.nesting, "Gamma": self.Gamma,
            "xi": self.xi, "nu": self.nu, "zeta": self.zeta, "t": self.t, "eps": self.eps,
            "D": self.D, "drivers": list(self.drivers),
            "band_bounds": [b.as_dict() for b in self.band_bounds],
            "fallback": self.fallback, "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def _theorem1_schedule(bounds, D, t, eps, reason, zeta=None) -> BandSchedule:
    b = NormBounds(bounds.Lambda, bounds.Lambda1, bounds.LambdaMax)
    return BandSchedule(kind="theorem1", t=t, eps=eps, D=D, L=1, cutoffs=(bounds.Lambda,),
                        band_bounds=(b,), drivers=("theorem1",), tau=(t,), eps_per_band=(eps,),
                        eps_rate=eps / t, K=(), nesting="none", interval=t, zeta=zeta,
                        fallback=reason, bounds=bounds)


def small_norm_schedule(bounds: NormBounds, D: int, t: float, eps: float, zeta: float,
                        L: int | None = None) -> BandSchedule:
    """Geometric cutoffs, Strang splitting over all bands, amplified walk per band.

    ``L`` defaults to ``max(2, ceil(log2 D))``.  The per-band time step is
    ``t / (2 floor(min{L^{3/2} Lambda^2 t^2/(2 eps), Lambda D^{1+1/2L} t/(2 zeta)}))``;
    when the second argument of the minimum is below one the schedule falls
    back to a single naive-walk run.  All bands (including the lowest) use the
    amplified walk.
    """
    _check_hypothesis(bounds, D, t, eps)
    if not (1.0 - REL <= zeta <= math.sqrt(D) * (1 + REL)):
        raise HypothesisError(f"1 <= zeta <= sqrt(D) fails: zeta = {zeta:.6g}, sqrt(D) = {math.sqrt(D):.6g}")
    if L is None:
        L = max(2, math.ceil(math.log2(D)))
    if L < 2:
        raise ContractError("the small-norm schedule needs L >= 2")
    Lam = bounds.Lambda
    if Lam * D * t < 2 * zeta * D ** (-1 / (2 * L)):
        return _theorem1_schedule(
            bounds, D, t, eps, zeta=zeta,
            reason=f"Lambda D t = {Lam * D * t:.6g} < 2 zeta D^(-1/2L) = "
                   f"{2 * zeta * D ** (-1 / (2 * L)):.6g}; banding cannot pay off")
    A = tuple(Lam * D ** (-l / (2 * L)) for l in range(L + 1))
    bb = tuple(NormBounds(min(zeta * Lam, Lam ** 2 / A[l + 1]), Lam ** 2 / A[l + 1], A[l])
               for l in range(L))
    m = _floor(min(L ** 1.5 * Lam ** 2 * t * t / (2 * eps),
                   Lam * D ** (1 + 1 / (2 * L)) * t / (2 * zeta)))
    tau = t / (2 * m)
    eps_l = eps * tau / (L ** 1.5 * t)
    sched = BandSchedule(kind="small_norm", t=t, eps=eps, D=D, L=L, cutoffs=A, band_bounds=bb,
                         drivers=("lemma6",) * L, tau=(tau,) * L, eps_per_band=(eps_l,) * L,
                         eps_rate=eps / (L ** 1.5 * t), K=(1,), nesting="strang(all bands)",
                         interval=2 * tau, zeta=zeta, bounds=bounds,
                         notes=("every band, including the lowest, uses the amplified walk",))
    sched.check_invariants()
    return sched


def large_norm_L(bounds: NormBounds, D: int, t: float, eps: float) -> int:
    """``L = ceil(log2(2/9 ln(eps D/(Lambda t)) + 4/3))``, and 1 when the ratio is at most ``e^3``."""
    R = eps * D / (bounds.Lambda * t)
    if R <= math.e ** 3 * (1 + REL):
        return 1
    return max(1, math.ceil(math.log2(2 / 9 * math.log(R) + 4 / 3) - REL))


def large_norm_schedule(bounds: NormBounds, D: int, t: float, eps: float) -> BandSchedule:
    """Nested schedule: Strang over ``{H_0, rest}``, fourth order inside ``rest`` when ``L >= 3``."""
    _check_hypothesis(bounds, D, t, eps)
    L = large_norm_L(bounds, D, t, eps)
    if L == 1:
        return _theorem1_schedule(bounds, D, t, eps,
                                  reason=f"eps D/(Lambda t) = {eps * D / (bounds.Lambda * t):.6g} "
                                         f"<= e^3 gives L = 1")
    Lam = bounds.Lambda
    Gamma = eps * D / (L * Lam * t)
    xi = 1.0 / (6 * (3 * 2 ** (L - 2) - 1))

    def cutoff(k):     # A_{L-k}
        return Lam / Gamma ** (1 / 3 - (3 * 2 ** (k - 1) - 2) * xi)

    A = tuple(cutoff(L - l) for l in range(L + 1))
    A = (Lam,) + A[1:]  # exact A_0 (the formula gives Lambda up to rounding)
    bb = [NormBounds(Lam ** 2 / A[l + 1], Lam ** 2 / A[l + 1], A[l]) for l in range(L - 1)]
    bb.append(NormBounds(Lam + Lam ** 2 / A[L - 1], Lam * math.sqrt(D), A[L - 1]))
    m = _floor(t * t * L * Lam ** 4 / (2 * eps * A[1] ** 2))
    tau1 = t / (2 * m)
    nu = None
    taus = [tau1] * L
    if L >= 3:
        nu = _floor(P2 * tau1 * L * Lam ** 4 * t / (2 * eps * A[2] ** 2))
        if nu < 1:
            raise AssertionError(f"nu = {nu} is not a positive integer")
        inner = P2 * tau1 / (2 * nu)
        taus = [tau1] + [inner] * (L - 1)
    eps_rate = eps / (L * t)
    drivers = ("lemma6",) * (L - 1) + ("theorem1",)
    sched = BandSchedule(kind="large_norm", t=t, eps=eps, D=D, L=L, cutoffs=A, band_bounds=tuple(bb),
                         drivers=drivers, tau=tuple(taus),
                         eps_per_band=tuple(eps_rate * s for s in taus), eps_rate=eps_rate,
                         K=(1,) if L == 2 else (1, 2),
                         nesting="strang(H_0, rest)" if L == 2 else
                                 "strang(H_0, rest); rest = [suzuki4(H_1..H_{L-1}, tau_1/nu)]^(2 nu)",
                         interval=2 * tau1, Gamma=Gamma, xi=xi, nu=nu, bounds=bounds,
                         notes=("lowest band uses the naive walk, the others the amplified walk",))
    sched.check_invariants()
    return sched
