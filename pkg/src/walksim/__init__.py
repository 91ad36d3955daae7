"""Walk-based simulation of sparse Hamiltonians and implementation of unitaries.

Submodules:

* :mod:`walksim.numerics`  -- linear algebra, density operators, RNG, file formats
* :mod:`walksim.oracle`    -- element/sparsity black boxes with query ledgers
* :mod:`walksim.stateprep` -- exact, naive and amplitude-amplified coin states
* :mod:`walksim.walk`      -- the quantum-walk isometry and walk operator
* :mod:`walksim.simulate`  -- lazy-walk channels and simulation drivers
* :mod:`walksim.decompose` -- magnitude bands, product formulas, schedules
* :mod:`walksim.cost`      -- closed-form query-count predictions
"""
from ._errors import (ContractError, HypothesisError, PreconditionError, SpectralMismatchError,
                      UnsupportedOrderError)
from .cost import cost_estimate
from .numerics import DensityOperator, trace_distance
from .oracle import NormBounds, OracleSet, QueryLedger
from .simulate import (EstimatorModel, SimulationReport, implement_unitary, lazy_walk_channel,
                       simulate_exact_unitary, simulate_lemma6, simulate_theorem1)
from .walk import WalkSystem, build_walk

__version__ = "0.1.0"

__all__ = [
    "ContractError", "HypothesisError", "PreconditionError", "SpectralMismatchError",
    "UnsupportedOrderError", "cost_estimate", "DensityOperator", "trace_distance",
    "NormBounds", "OracleSet", "QueryLedger", "EstimatorModel", "SimulationReport",
    "implement_unitary", "lazy_walk_channel", "simulate_exact_unitary", "simulate_lemma6",
    "simulate_theorem1", "WalkSystem", "build_walk", "__version__",
]
