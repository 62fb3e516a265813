"""Exception types raised by qsmc."""


class QSMCError(Exception):
    """Base class for all qsmc errors."""


class InvalidModel(QSMCError, ValueError):
    pass


class DimensionError(QSMCError, ValueError):
    pass


class InvalidBlochVector(QSMCError, ValueError):
    pass


class InfeasibleSchedule(QSMCError):
    """No bang-bang schedule reaches the target within the time budget."""


class ConsistencyError(QSMCError):
    """A worst-case construction failed its own self-check."""


class AmplificationError(QSMCError, ValueError):
    """Amplitude amplification cannot act (no overlap with the good subspace)."""


class IterationBudgetExceeded(QSMCError):
    """No iteration count up to ``L_max`` reaches the failure budget."""

    def __init__(self, message: str, best_L: int, best_bad_probability: float):
        super().__init__(message)
        self.best_L = best_L
        self.best_bad_probability = best_bad_probability


class ConfigError(QSMCError, ValueError):
    pass
