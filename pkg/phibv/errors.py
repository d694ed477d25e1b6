"""Error types.

All errors derive from ``ValueError`` so library callers can keep catching the
builtin, while the command line maps each family onto an exit code.
"""

from typing import Optional


class DomainError(ValueError):
    """Point or atom incompatible with the domain."""


class ShapeError(ValueError):
    """Grid samples do not match the expected grid."""


class ClassificationError(ValueError):
    """Input outside the scope of a classification result."""


class DataFormatError(ValueError):
    """Malformed input file.

    Parameters
    ----------
    path : str
        Offending file.
    message : str
        What is wrong.
    line : Optional[int]
        1-based line of the problem, for text formats.
    byte : Optional[int]
        Byte offset of the problem, for binary formats.
    """

    def __init__(
        self,
        path: str,
        message: str,
        line: Optional[int] = None,
        byte: Optional[int] = None,
    ):
        self.path = path
        self.line = line
        self.byte = byte
        location = ""
        if line is not None:
            location = f", line {line}"
        elif byte is not None:
            location = f", byte {byte}"
        super().__init__(f"{path}{location}: {message}")


class ConvergenceError(RuntimeError):
    """Iterative method stopped at its cap; raised only on request."""
