"""Exception hierarchy shared by every module."""


class ContractError(ValueError):
    """An argument violates a documented structural contract (shape, hermiticity, range)."""


class PreconditionError(ValueError):
    """A documented numerical precondition of an algorithm does not hold."""


class HypothesisError(PreconditionError):
    """A theorem hypothesis (an inequality between problem parameters) is violated."""


class UnsupportedOrderError(ContractError):
    """Requested product-formula order is not implemented."""


class SpectralMismatchError(RuntimeError):
    """A predicted walk eigenphase could not be found in the computed spectrum."""
