"""Global numeric constants shared by every module."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    compare: float = 1e-9
    """Comparisons between derived quantities (influences, coefficients)."""
    identity: float = 1e-12
    """Direct arithmetic identities and normalization checks."""


TOL = Tolerances()

ENUMERATION_CAP = 2**20
"""Largest number of configurations any exact enumeration may touch."""

DEFAULT_DRAWS = 10_000
DEFAULT_BURN_IN = 1_000
