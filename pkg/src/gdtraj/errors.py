"""Error taxonomy shared across the library and the CLI.

The CLI maps these onto process exit codes: configuration errors exit 2,
invariant failures exit 3, numeric faults exit 4.
"""


class ConfigurationError(ValueError):
    """Bad user input: unknown keys, malformed values, missing presets."""


class DimensionMismatch(ValueError):
    """Array shapes disagree with the declared objective dimension."""


class NumericFault(RuntimeError):
    """Non-finite values were produced during a run."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message if step is None else f"{message} (step {step})")
        self.step = step


class InvariantFailure(RuntimeError):
    """A report-level invariant gate did not hold."""
