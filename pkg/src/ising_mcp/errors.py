from __future__ import annotations


class IsingError(Exception):
    """Base class for every error raised by the toolkit."""


class ConfigError(IsingError):
    pass


class GraphFormatError(IsingError):
    """Malformed rudy input. ``line`` is 1-based, 0 when not tied to a line."""

    def __init__(self, message: str, line: int = 0):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)

    def __reduce__(self):
        return type(self), (self.message, self.line)


class DimensionError(IsingError):
    pass


class GraphTooLargeError(IsingError):
    pass


class FixedPointClassError(IsingError):
    pass


class NotSymmetricError(IsingError):
    pass


class IntegrationError(IsingError):
    def __init__(self, message: str, step: int):
        self.message = message
        self.step = step
        super().__init__(f"step {step}: {message}")

    def __reduce__(self):
        return type(self), (self.message, self.step)


class NoBifurcationError(IsingError):
    pass


class ModelAbsentError(IsingError):
    pass


class TrialError(IsingError):
    """An integration failure inside a portfolio, tagged with where it happened."""

    def __init__(self, model: str, trial_id: int, cause: Exception):
        self.model = model
        self.trial_id = trial_id
        self.cause = cause
        super().__init__(f"{model} trial {trial_id}: {cause}")

    def __reduce__(self):
        return type(self), (self.model, self.trial_id, self.cause)


INPUT_ERRORS = (ConfigError, GraphFormatError, DimensionError, GraphTooLargeError,
                FixedPointClassError, ModelAbsentError)
NUMERICAL_ERRORS = (IntegrationError, TrialError, NotSymmetricError)
