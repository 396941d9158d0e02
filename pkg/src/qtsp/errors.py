"""Error types shared across the package."""


class ValidationError(ValueError):
    """Raised when inputs violate a structural precondition."""


class CapacityError(RuntimeError):
    """Raised when a request exceeds the configured qubit/size limits."""


class NormDriftError(RuntimeError):
    """Raised when a statevector's norm drifts beyond tolerance.

    Drift at these circuit depths indicates a construction bug, so we never
    renormalize silently.
    """
