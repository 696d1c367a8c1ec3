"""Exception types shared across the package.

The CLI maps these onto process exit codes, so keep the hierarchy flat and
unambiguous: one class per failure family.
"""


class CmloopsError(Exception):
    """Base class for all package-specific errors."""


class InvalidDegreeSequenceError(CmloopsError, ValueError):
    """A degree sequence failed validation (positivity, parity, equal totals)."""


class CapExceededError(CmloopsError, RuntimeError):
    """An exhaustive enumeration was requested above the configured cap."""


class InvalidCouplingError(CmloopsError, ValueError):
    """A rewiring target or event descriptor is malformed for the sequence."""


class UndefinedValueError(CmloopsError, ArithmeticError):
    """A required quantity is undefined for this input (e.g. scale <= 0)."""
