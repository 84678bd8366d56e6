from typing import Optional


class SketchError(Exception):
    """Base class for every error raised by the toolkit."""


class PathTypingError(SketchError):
    """A path is not composable, paths are not parallel, or an id is unknown."""


class DuplicateIdError(SketchError):
    """A freshly minted or declared id collides with an existing one."""


class UnsupportedShapeError(SketchError):
    """A pushout was requested outside the supported gluing shape."""


class ConeValidationError(SketchError):
    """A cone fails naturality or references unknown data."""

    def __init__(self, message: str, index_morphism: Optional[str] = None):
        super().__init__(message)
        self.index_morphism = index_morphism


class PreconditionError(SketchError):
    """Side conditions of an induced map or extension are violated."""


class ModelTypeError(SketchError):
    """A set-valued model is not typed over the sketch."""


class RealizationError(SketchError):
    """An operation needs a Stabilized realization."""


class SketchSyntaxError(SketchError):
    """The sketch DSL could not be tokenized or parsed."""

    def __init__(self, message: str, line: int, column: int, expected: Optional[list] = None):
        self.line = line
        self.column = column
        self.expected = list(expected or [])
        location = f"line {line}, column {column}"
        if self.expected:
            message = f"{message} (expected {', '.join(self.expected)})"
        super().__init__(f"{location}: {message}")


class SketchSemanticError(SketchError):
    """The sketch DSL parsed but violates a naming or typing rule."""

    def __init__(self, message: str, line: int, column: int, rule: str):
        self.line = line
        self.column = column
        self.rule = rule
        super().__init__(f"line {line}, column {column}: {message} [{rule}]")
