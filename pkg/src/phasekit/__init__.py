"""Oracle-driven phase changes, permutations and block mixing on a dense state-vector simulator.

Qubit 0 is the least significant bit of a basis index.  Methods that need
ancillas place them above the main register and return the joint state.
"""

from .errors import DomainError, InvariantViolation, PhaseKitError, PreconditionError, ValidationError
from .resources import ResourceReport, check_claims, merge
from .statevector import Rng, StateVector

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "InvariantViolation",
    "PhaseKitError",
    "PreconditionError",
    "ValidationError",
    "ResourceReport",
    "Rng",
    "StateVector",
    "check_claims",
    "merge",
]
