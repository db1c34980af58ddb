"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class SchemaError(ValueError):
    """A parameter set is missing a field required by a theorem check."""


class ContractError(ValueError):
    """An operation was invoked outside its stated contract."""


class CalibrationError(RuntimeError):
    """A fractional-difference scheme was used before calibration."""


class QuadratureFailure(RuntimeError):
    """Adaptive integration did not converge within its panel budget.

    Carries the partial result and the achieved error estimate so callers
    can decide whether the partial value is still usable.
    """

    def __init__(self, message, partial, estimate):
        super().__init__(f"{message} (partial={partial!r}, estimate={estimate!r})")
        self.partial = partial
        self.estimate = estimate
