class QDChoiceError(Exception):
    """Base class for domain errors raised by this package."""


class InvalidArgumentError(QDChoiceError, ValueError):
    pass


class DegenerateConditioningError(QDChoiceError, ZeroDivisionError):
    """Conditioning on an ancilla outcome whose marginal is (numerically) zero."""


class DegenerateSettingError(QDChoiceError, ValueError):
    """Setting with p1 == 0 (epsilon = 1, alpha = 0); beta is undefined there."""


class InsufficientStatisticsError(QDChoiceError, RuntimeError):
    pass


class NotASolutionError(QDChoiceError, ValueError):
    """Raised when classifying a parameter vector that does not solve the model."""
