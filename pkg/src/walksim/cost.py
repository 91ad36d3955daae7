"""Closed-form query-count predictions with all big-O constants set to one.

Each formula is evaluated only when its hypotheses hold; otherwise the
estimate carries the list of violated inequalities and no value.
Logarithms are natural; ``log log D`` is clamped below at 1 so the
predictions stay positive and monotone at small ``D``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from ._errors import ContractError

THEOREMS = ("t1", "lem6", "sm", "t2", "cor1", "corr11", "exact")

_REQUIRED = {
    "t1": ("Lambda", "LambdaMax", "D", "t", "eps"),
    "lem6": ("Lambda", "Lambda1", "LambdaMax", "D", "t", "eps"),
    "sm": ("Lambda", "D", "t", "eps", "zeta"),
    "t2": ("Lambda", "D", "t", "eps"),
    "cor1": ("N", "eps"),
    "corr11": ("LambdaMax", "Lambda1", "N", "eps"),
    "exact": ("N", "LambdaMax"),
}


@dataclass(frozen=True)
class CostEstimate:
    theorem: str
    value: float | None
    violations: list[str] = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.value is not None

    def as_dict(self) -> dict:
        return {"theorem": self.theorem, "value": self.value,
                "violations": list(self.violations), "params": dict(self.params)}


def loglog(x: float) -> float:
    """``max(1, ln ln x)``."""
    if x <= math.e:
        return 1.0
    return max(1.0, math.log(math.log(x)))


def _check(theorem: str, p: dict) -> list[str]:
    v = []
    if theorem == "lem6":
        if p["Lambda"] * p["t"] < math.sqrt(p["eps"]):
            v.append("Lambda t >= sqrt(eps) fails")
        if p["Lambda"] * p["t"] < p["Lambda"] ** 2 / (p["LambdaMax"] * p["Lambda1"] * p["D"]):
            v.append("Lambda t >= Lambda^2/(LambdaMax Lambda1 D) fails")
        if p["Lambda"] > p["Lambda1"]:
            v.append("Lambda <= Lambda1 fails")
    elif theorem in ("sm", "t2"):
        Lt = p["Lambda"] * p["t"]
        if not (p["eps"] * p["D"] > Lt):
            v.append("eps D > Lambda t fails")
        if not (Lt > math.sqrt(p["eps"])):
            v.append("Lambda t > sqrt(eps) fails")
        if theorem == "sm" and not (1.0 <= p["zeta"] <= math.sqrt(p["D"]) * (1 + 1e-12)):
            v.append("1 <= zeta <= sqrt(D) fails")
    elif theorem == "cor1":
        if not (p["eps"] * p["N"] > math.pi / 2):
            v.append("eps N > pi/2 fails")
    return v


def cost_estimate(theorem: str, **params) -> CostEstimate:
    """Predicted query count for ``theorem`` in :data:`THEOREMS`.

    ``sm`` accepts an optional ``L``; with it the band-count form
    ``L^{7/4} (Lambda t)^{3/2} D^{1/2 + 1/(4L)} sqrt(zeta/eps)`` is used instead of
    ``sqrt(zeta D/eps) (log D)^{7/4} (Lambda t)^{3/2}``.
    """
    if theorem not in THEOREMS:
        raise ContractError(f"unknown theorem {theorem!r}; choose from {THEOREMS}")
    missing = [k for k in _REQUIRED[theorem] if k not in params]
    if missing:
        raise ContractError(f"{theorem} needs parameters {missing}")
    p = {k: float(v) for k, v in params.items()}
    if p.get("eps", 1.0) <= 0:
        return CostEstimate(theorem, None, ["eps > 0 fails"], p)
    violations = _check(theorem, p)
    if violations:
        return CostEstimate(theorem, None, violations, p)
    if theorem == "t1":
        val = p["Lambda"] * p["t"] / math.sqrt(p["eps"]) + p["D"] * p["LambdaMax"] * p["t"] + 1
    elif theorem == "lem6":
        val = p["t"] ** 1.5 * math.sqrt(p["LambdaMax"] * p["D"] * p["Lambda1"] * p["Lambda"] / p["eps"])
    elif theorem == "sm":
        Lt = p["Lambda"] * p["t"]
        if "L" in p:
            L = p["L"]
            val = L ** 1.75 * Lt ** 1.5 * p["D"] ** (0.5 + 1 / (4 * L)) * math.sqrt(p["zeta"] / p["eps"])
        else:
            val = math.sqrt(p["zeta"] * p["D"] / p["eps"]) * max(1.0, math.log(p["D"])) ** 1.75 * Lt ** 1.5
    elif theorem == "t2":
        val = p["D"] ** (2 / 3) * (loglog(p["D"]) * p["Lambda"] * p["t"]) ** (4 / 3) * p["eps"] ** (-1 / 3)
    elif theorem == "cor1":
        val = p["N"] ** (2 / 3) * loglog(p["N"]) ** (4 / 3) * p["eps"] ** (-1 / 3)
    elif theorem == "corr11":
        val = math.sqrt(p["LambdaMax"] * p["N"] * p["Lambda1"] / p["eps"])
    else:  # exact
        val = p["N"] * p["LambdaMax"]
    return CostEstimate(theorem, float(val), [], p)
