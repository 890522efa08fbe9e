"""Exception types raised across the package."""


class CalctuneError(Exception):
    """Base class for all package errors."""


class InvalidTable(CalctuneError, ValueError):
    """Cells are negative, non-finite, or do not sum to one."""


class DegenerateSlice(CalctuneError, ValueError):
    """A conditional was requested on an (e1, e2) slice with no mass."""


class InvalidProbe(CalctuneError, ValueError):
    """An evidence probe is outside [0, 1] or incompatible with the prior."""


class NoConvergence(CalctuneError, RuntimeError):
    """Iterative proportional fitting exhausted its iteration budget."""


class OptimizerFailure(CalctuneError, RuntimeError):
    """No start of the parameter search improved on its initial point."""


class ZeroVariance(CalctuneError, ValueError):
    """A statistic needs a non-constant input vector."""


class InsufficientData(CalctuneError, ValueError):
    """Too few observations for the requested statistic."""
