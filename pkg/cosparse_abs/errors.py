# cosparse_abs/errors.py
from __future__ import annotations


class AbsError(Exception):
    """Root of every error raised by this package."""


class ContractViolation(AbsError, ValueError):
    """Shape mismatch, non-finite entries or a violated precondition."""


class NumericsError(AbsError, ArithmeticError):
    """A factorization did not converge."""


class GenerationError(AbsError):
    """Random instance generation ran out of redraws."""


class InfeasibleError(AbsError):
    """Equality constraints have no solution within tolerance."""


class EnumerationGuardError(AbsError):
    """Exhaustive search would exceed the combination guard."""


class ConfigError(AbsError):
    pass


class ContainerError(AbsError):
    """Serialized instance is unreadable (magic, version or payload)."""
