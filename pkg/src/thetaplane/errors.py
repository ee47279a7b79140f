"""Exception hierarchy shared by every module."""


class ThetaPlaneError(Exception):
    """Base class for all library errors."""


class SignatureMismatchError(ThetaPlaneError):
    """Operands belong to different algebras (n, m or mode differ)."""


class DomainError(ThetaPlaneError):
    """A mathematical precondition failed (bad index, wrong mode, ...)."""


class ParseError(ThetaPlaneError):
    """Syntax error in an element expression, matrix file or theta config.

    ``pos`` is a 0-based character offset into the offending text and
    ``line`` a 1-based line number when the text came from a file.
    """

    def __init__(self, message, pos=None, line=None):
        self.message = message
        self.pos = pos
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if pos is not None:
            where.append(f"col {pos + 1}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class NotAProjectorError(DomainError):
    pass


class DiagonalizationError(DomainError):
    pass


class UnitarityCompletionError(DomainError):
    """The degree-d unitarity residual did not vanish after completion."""


class IdentityFailure(ThetaPlaneError):
    """Two independent computations of the same quantity disagree.

    This always signals an arithmetic bug, never bad user input.
    """
