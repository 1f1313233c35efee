"""Exception types shared across the toolkit."""


class JtdSimError(Exception):
    """Base class for all toolkit errors."""


class SolverError(JtdSimError):
    """Iterative solver failed to converge.

    Carries the last residual so callers can judge how close it got.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateGeometryError(JtdSimError):
    """Ion positions coincide or are not strictly ordered."""


class PhaseDomainError(JtdSimError):
    """Mean-field branch evaluated on the wrong side of the critical coupling."""


class NumericalInconsistencyError(JtdSimError):
    """A result violates a structural guarantee (variational bound, positivity, ...)."""


class NormalizationError(JtdSimError):
    """State vector is not normalized."""


class SectorWindowError(JtdSimError):
    """Ground-state scan hit the edge of the requested charge window."""


class StepSizeError(JtdSimError):
    """Time step too coarse: norm drifted beyond the allowed bound."""


class ConfigError(JtdSimError):
    """Invalid run configuration (bad flag value, unknown config key, ...)."""
