"""Exception hierarchy.  The CLI maps these onto exit codes."""


class EndgridError(Exception):
    """Base class for all package errors."""


class InvalidArgument(EndgridError, ValueError):
    pass


class AntichainViolation(EndgridError):
    """An antichain meets a ladder interval in two or more points."""


class CertificationError(EndgridError):
    """A structural claim that should hold on the instance was refuted.

    ``witness`` carries whatever refutes it (a component, a path family).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InternalError(EndgridError):
    """Two independent routes disagree: a bug, never a verdict."""


class SchemaError(EndgridError, ValueError):
    """Malformed input file."""
