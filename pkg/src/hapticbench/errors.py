"""Exception types shared across the workbench."""


class InvalidSpecError(ValueError):
    """A parameter or configuration violates an operation's preconditions."""


class EmptyInputError(ValueError):
    """An input signal or dataset has no usable content."""


class NonIdentifiableError(ValueError):
    """The data cannot identify the requested model (e.g. one stimulus level)."""


class DegenerateDataError(ValueError):
    """The data admit no meaningful answer (zero variance, all-tied ranks, ...).

    ``partial`` carries whatever intermediate result was computed before the
    degeneracy was detected, when one exists.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ProtocolViolationError(RuntimeError):
    """A session mutation that breaks the trial protocol (double answer, out-of-order index)."""


class SessionCompleteError(RuntimeError):
    """Raised when asking for the next trial of a finished session."""


class SchemaViolationError(ValueError):
    """A serialized artifact does not match its schema."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
