"""Exception hierarchy.

Everything the CLI maps to exit code 2 derives from :class:`InvphaseError`.
"""


class InvphaseError(Exception):
    pass


class ParseError(InvphaseError):
    def __init__(self, message: str, line: int = 1, column: int = 1,
                 expected: tuple[str, ...] = (), source: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        self.source = source
        where = f"{source}:" if source else ""
        exp = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{where}{line}:{column}: {message}{exp}")


class ValidationError(InvphaseError):
    """A loaded object violates one of its invariants."""


class Mismatch(ValidationError):
    """Homomorphism endpoints or matrix shapes disagree."""


class IllDefinedHomomorphism(ValidationError):
    pass


class CompositionNotZero(ValidationError):
    pass


class OutOfWindow(ValidationError):
    pass


class UnknownSubgroup(ValidationError):
    pass


class MissingTransfer(ValidationError):
    pass


class LatticeMismatch(ValidationError):
    pass


class StabilizerViolation(ValidationError):
    pass


class DimensionGap(ValidationError):
    pass


class BoundaryNotClosed(ValidationError):
    pass


class UnknownPreset(ValidationError):
    pass


class WindowViolation(ValidationError):
    pass


class TruncationExceeded(ValidationError):
    pass


class Underdetermined(InvphaseError):
    def __init__(self, missing: list[str]):
        self.missing = list(missing)
        super().__init__("underdetermined: missing " + "; ".join(self.missing))


class InconsistentExactness(ValidationError):
    pass
