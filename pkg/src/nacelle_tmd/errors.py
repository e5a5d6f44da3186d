"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid TMD configuration or malformed configuration document."""


class MotionError(ValueError):
    """Invalid or malformed nacelle-motion input."""


class NumericalFailure(ArithmeticError):
    """Non-finite values produced while integrating; ``t`` is the failing time."""

    def __init__(self, message: str, t: float | None = None):
        if t is not None:
            message = f"{message} at t = {t:.9g} s"
        super().__init__(message)
        self.t = t


class OracleInvalidError(NumericalFailure):
    """The penalty oracle let the mass drift too far off its track."""
