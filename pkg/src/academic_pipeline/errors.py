"""Exception hierarchy shared across the package."""


class PipelineError(Exception):
    """Base class for all errors raised by academic_pipeline."""


class PreconditionError(PipelineError, ValueError):
    """An operation received inputs outside its domain (negative stocks, zero divisors, ...)."""


class InfeasibleParamsError(PipelineError, ValueError):
    """Parameters fail one or more feasibility/boundedness conditions.

    ``failed`` holds the names of the violated conditions.
    """

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = tuple(failed)


class DegreeDataError(PipelineError, ValueError):
    """Malformed degree-series input. Carries the offending row and field when known."""

    def __init__(self, message, row=None, field=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.field = field


class PrccDegeneracyError(PipelineError, ValueError):
    """The rank regression behind a PRCC coefficient is singular."""


class ConfigError(PipelineError, ValueError):
    """Invalid run configuration."""
