"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A scenario, table, or trainer configuration is inconsistent."""


class InvalidParameterError(ValueError):
    """A numeric argument is out of domain (negative, non-finite, wrong shape)."""


class BudgetExceededError(RuntimeError):
    """An enumeration or search exceeded its configured resource budget."""


class InfeasibleScenarioError(RuntimeError):
    """Feasible-instance rejection sampling failed to make progress."""
