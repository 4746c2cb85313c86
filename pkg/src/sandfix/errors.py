class SandpileError(Exception):
    """Base class for every error raised by sandfix."""


class NotApplicableError(SandpileError):
    """A move was applied to a configuration where it cannot fire."""


class UnsupportedModeError(SandpileError):
    pass


class DivergenceError(SandpileError):
    """The step limit ran out before a fixed point was reached."""


class GraphExplosionError(SandpileError):
    """Orbit-graph construction exceeded its vertex limit."""


class PreconditionError(SandpileError):
    pass


class InvariantViolation(SandpileError):
    """An internal invariant or proven bound did not hold.

    These must never fire on valid input; they exist to surface bugs.
    """


class ConfigurationSyntaxError(SandpileError, ValueError):
    """Text that does not describe a configuration."""
