"""Exception taxonomy shared across the package."""


class FpflowError(Exception):
    """Base class for package-specific failures."""


class ConfigError(FpflowError, ValueError):
    """A configuration value is outside its admissible range."""


class NumericError(FpflowError, ArithmeticError):
    """A computation produced non-finite or degenerate values."""


class SolverError(FpflowError, RuntimeError):
    """The time integrator detected a stability or conservation violation."""


class ResourceError(FpflowError, RuntimeError):
    """A search exhausted its query or ancilla budget."""
