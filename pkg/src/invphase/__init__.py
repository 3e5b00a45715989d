"""Exact computation of groups of invertible phases on spaces with symmetry."""

from .errors import InvphaseError, ParseError, ValidationError
from .fgab import FgAbGroup, Homomorphism

__all__ = ["FgAbGroup", "Homomorphism", "InvphaseError", "ParseError", "ValidationError"]
__version__ = "0.1.0"
