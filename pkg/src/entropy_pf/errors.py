"""Exception hierarchy shared by the solver, the oracles and the CLI."""


class EntropyPFError(Exception):
    """Base class for every error raised by this package."""


class NumericFailure(EntropyPFError):
    """A scalar root find did not converge within its iteration cap."""

    def __init__(self, message, eps=None, r=None, bracket=None):
        super().__init__(message)
        self.eps = eps
        self.r = r
        self.bracket = bracket


class DomainError(EntropyPFError, ValueError):
    """A singular nonlinearity was evaluated outside its domain."""


class SpecValidationError(EntropyPFError, ValueError):
    """A problem specification violates one of the structural hypotheses."""

    def __init__(self, report):
        lines = "; ".join(str(v) for v in report)
        super().__init__(f"invalid problem specification: {lines}")
        self.report = report


class NewtonDivergence(EntropyPFError):
    """Newton iteration for one implicit solve failed to reach tolerance."""

    def __init__(self, message, residual=None, iterate_min=None, iterate_max=None):
        super().__init__(message)
        self.residual = residual
        self.iterate_min = iterate_min
        self.iterate_max = iterate_max


class StepFailure(EntropyPFError):
    """A time step failed; the partial trajectory is kept for post-mortem."""

    def __init__(self, cause, trajectory):
        super().__init__(f"time step failed at t={trajectory.times[-1]:.6g}: {cause}")
        self.cause = cause
        self.trajectory = trajectory


class OracleWindowError(EntropyPFError):
    """A reference integrator left the positive window where it is trusted."""


class ConfigError(EntropyPFError):
    """Malformed or inconsistent configuration file."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno
