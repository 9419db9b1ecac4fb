"""Exception hierarchy shared by all ontodetect modules."""


class OntoDetectError(Exception):
    """Base class for every error raised by this package."""


class CloudIOError(OntoDetectError, OSError):
    """A point cloud or data file could not be read."""


class ParseError(OntoDetectError, ValueError):
    """Malformed line in a line-oriented text format."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyCloud(OntoDetectError, ValueError):
    pass


class InvalidCellSize(OntoDetectError, ValueError):
    pass


class InvalidParams(OntoDetectError, ValueError):
    pass


class TooFewPoints(OntoDetectError, ValueError):
    pass


class CycleError(OntoDetectError, ValueError):
    """Adding a subclass edge would make the class hierarchy cyclic."""


class RuleSyntaxError(ParseError):
    """Rule text does not match the grammar."""

    def __init__(self, message, position=None, expected=None, line=None):
        self.position = position
        self.expected = expected
        if position is not None:
            message = f"at column {position + 1}: {message}"
        if expected:
            message = f"{message} (expected {expected})"
        super().__init__(message, line)


class SafetyError(OntoDetectError, ValueError):
    """A consequent variable is not bound by the antecedent."""


class ArityError(OntoDetectError, ValueError):
    pass


class UnboundBuiltInArg(OntoDetectError, RuntimeError):
    """A predicate built-in was reached with an unbound variable."""


class DuplicateBuiltIn(OntoDetectError, ValueError):
    pass


class TypeMismatch(OntoDetectError, TypeError):
    pass


class NoGeometry(OntoDetectError, LookupError):
    """An individual has no resolvable bounding box."""


class InvalidDistance(OntoDetectError, ValueError):
    pass


class SpecError(OntoDetectError, ValueError):
    """Invalid synthetic scene specification."""


class MissingGeometry(OntoDetectError, ValueError):
    """A classified individual carries no geometry facts."""


class SchemaConflict(OntoDetectError, ValueError):
    """A KB already holds subclass edges that contradict the installed taxonomy."""
