"""Exception types shared across the package."""


class KinterpError(Exception):
    """Base class for all package errors."""


class DomainError(KinterpError):
    """A function was evaluated outside its mathematical domain."""


class TableMissError(DomainError):
    """A tabulated envelope was queried outside its grid."""


class ParameterError(KinterpError):
    """A parameter violates a stated precondition; the message names it."""


class InvariantError(KinterpError):
    """Input data violates a structural invariant (monotonicity, NaN, ...)."""


class GridRangeError(KinterpError):
    """A query point left the grid range."""


class CaseError(KinterpError):
    """A couple case fails one of its finiteness hypotheses."""


class ParseError(KinterpError):
    """Positioned syntax/range diagnostic for the text DSL."""

    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(message)
        self.message = message
        self.pos = pos
        self.text = text

    def pretty(self) -> str:
        lines = [f"parse error at column {self.pos + 1}: {self.message}"]
        if self.text:
            lines.append(self.text)
            lines.append(" " * self.pos + "^")
        return "\n".join(lines)
