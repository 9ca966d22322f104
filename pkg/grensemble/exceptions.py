"""Exceptions raised by grensemble."""

from typing import Any


class GrensembleException(Exception):
    pass


class GrensembleValueError(ValueError, GrensembleException):
    pass


class GraphError(GrensembleValueError):
    """A graph violates one of the LabeledGraph invariants."""


class DuplicateEdge(GraphError):
    def __init__(self, source: Any, target: Any):
        super().__init__(f"duplicate edge ({source}, {target})")
        self.source = source
        self.target = target


class DanglingEndpoint(GraphError):
    def __init__(self, source: Any, target: Any, missing: Any):
        super().__init__(f"edge ({source}, {target}) references unknown node {missing}")
        self.source = source
        self.target = target
        self.missing = missing


class EmptyLabel(GraphError):
    def __init__(self, element: Any):
        super().__init__(f"empty label on {element}")
        self.element = element


class PenmanSyntaxError(GrensembleValueError):
    def __init__(self, message: str, lineno: int | None = None, offset: int | None = None):
        where = ""
        if lineno is not None:
            where = f" (line {lineno}, column {offset})"
        super().__init__(f"{message}{where}")
        self.lineno = lineno
        self.offset = offset


class DuplicateVariableConcept(GrensembleValueError):
    def __init__(self, variable: str, concepts: list[str]):
        super().__init__(f"variable {variable} has more than one concept: {', '.join(concepts)}")
        self.variable = variable
        self.concepts = concepts


class NotRooted(GrensembleValueError):
    pass


class Disconnected(GrensembleValueError):
    pass


class NotSerializable(GrensembleValueError):
    """The graph has no lossless PENMAN form."""


class CorpusEntryError(GrensembleValueError):
    def __init__(self, ordinal: int, entry_id: str | None, cause: Exception):
        super().__init__(f"entry {ordinal} (::id {entry_id}): {cause}")
        self.ordinal = ordinal
        self.entry_id = entry_id
        self.cause = cause


class AlignmentError(GrensembleException):
    """Prediction files cannot be aligned entry by entry."""


class LengthMismatch(AlignmentError):
    pass


class IdMismatch(AlignmentError):
    def __init__(self, entry_id: str | None, message: str):
        super().__init__(f"::id {entry_id}: {message}")
        self.entry_id = entry_id


class TooLarge(GrensembleValueError):
    pass


class DegenerateVariance(GrensembleValueError):
    pass


class EmptyCollection(GrensembleValueError):
    pass
