"""Exception hierarchy shared by every phasekit module."""


class PhaseKitError(Exception):
    """Base class for all phasekit errors."""


class ValidationError(PhaseKitError, ValueError):
    """An input object violates its declared invariants (non-unitary gate, bad oracle range, ...)."""


class DomainError(PhaseKitError, ValueError):
    """An argument lies outside the domain of an operation (index out of range, bad modulus, ...)."""


class PreconditionError(PhaseKitError, ValueError):
    """The state handed to an operation is not in the required form (e.g. a dirty ancilla)."""


class InvariantViolation(PhaseKitError, RuntimeError):
    """An internal consistency check failed; indicates a broken oracle or a bug."""
