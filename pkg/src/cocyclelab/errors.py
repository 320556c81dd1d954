"""Exception types shared across the package."""


class CocycleLabError(Exception):
    """Base class for all package errors."""


class NotPrimitive(CocycleLabError):
    """Transition matrix has no entrywise-positive power."""


class BudgetExceeded(CocycleLabError):
    """An enumeration would exceed the configured budget."""


class NotClosable(CocycleLabError):
    """Word cannot be closed into a periodic orbit (forbidden wrap transition)."""


class InadmissibleWindow(CocycleLabError):
    """Generator table has no entry for the requested window."""


class InadmissibleOrbit(CocycleLabError):
    """Periodic orbit does not belong to the generator's shift space."""


class NotFound(CocycleLabError):
    """Uniform-growth search exhausted n_max without success."""

    def __init__(self, n_max, message=None):
        super().__init__(message or f"no uniform bound found up to n_max={n_max}")
        self.n_max = n_max


class HypothesisUnavailable(CocycleLabError):
    """The growth hypothesis needed for the contradiction replay is not available."""


class ObstructionFailed(CocycleLabError):
    """Periodic obstruction check failed, so the coboundary equation is unsolvable."""


class CoverageIncomplete(CocycleLabError):
    """Orbit walk left some cylinders unvisited within the budget."""

    def __init__(self, missing, message=None):
        missing = tuple(missing)
        super().__init__(
            message or f"{len(missing)} cylinders unvisited within orbit budget"
        )
        self.missing = missing


class SingularWindow(CocycleLabError):
    """Operation requires an invertible matrix on every window."""


class SchemaError(CocycleLabError):
    """Config failed validation; carries every violation found, not just the first."""

    def __init__(self, violations):
        violations = tuple(violations)
        super().__init__("; ".join(violations))
        self.violations = violations
