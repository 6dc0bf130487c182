"""Exception types shared across the workbench."""


class RsxError(Exception):
    """Base class for all workbench errors."""


class NoFuture(RsxError):
    """Cursor cannot advance: the run-time type has no remaining actions."""


class NoPast(RsxError):
    """Cursor cannot rewind: the run-time type has no executed actions."""


class UnboundVariable(RsxError):
    """Reverse update hit a variable with no recorded value (inconsistent undo)."""


class WellFormednessError(RsxError):
    """Configuration violates a structural invariant (linearity, binders, stacks)."""


class StaleRedex(RsxError):
    """The redex no longer matches the configuration it is applied to."""


class UnknownSession(RsxError):
    """Stepper session token does not name a live session."""
