"""Exception types shared across the simulator."""


class ConfigurationError(ValueError):
    """Raised for invalid or inconsistent configuration values."""


class DomainError(ValueError):
    """Raised when an operation receives input outside its domain
    (empty or all-zero signals, mismatched lengths, out-of-range values)."""


class IllConditionedError(RuntimeError):
    """Raised when a least-squares basis matrix is numerically rank
    deficient. Carries the condition-number estimate."""

    def __init__(self, cond: float, msg: str | None = None):
        self.cond = cond
        super().__init__(msg or f"basis matrix ill-conditioned (cond estimate {cond:.3e})")
