"""Magnitude-band decomposition, product formulas, band schedules and cost formulas."""
from ..cost import THEOREMS, CostEstimate, cost_estimate
from .bands import Band, BrkResult, band, brk, brk_details, magnitude_levels, partition, perturbed_qft
from .driver import simulate_decomposed
from .schedules import BandSchedule, large_norm_L, large_norm_schedule, small_norm_schedule
from .trotter import P2, TrotterSequence, strang, suzuki_coefficient, suzuki_sequence

__all__ = [
    "THEOREMS", "CostEstimate", "cost_estimate",
    "Band", "BrkResult", "band", "brk", "brk_details", "magnitude_levels", "partition", "perturbed_qft",
    "simulate_decomposed",
    "BandSchedule", "large_norm_L", "large_norm_schedule", "small_norm_schedule",
    "P2", "TrotterSequence", "strang", "suzuki_coefficient", "suzuki_sequence",
]
