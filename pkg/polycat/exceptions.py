"""
Exception hierarchy for the polycat engine.

Every error raised on purpose by the engine derives from PolycatError so
management commands can map it to exit code 1 in one place.
"""


class PolycatError(Exception):
    """Base class for engine errors"""


class MalformedCategory(PolycatError):
    """A presented category or diagram refers to something it does not declare"""

    def __init__(self, message, offender=None):
        super().__init__(message)
        self.offender = offender


class MalformedDiagram(MalformedCategory):
    """A Set-valued diagram has wrong sets, actions, or breaks a relation"""


class UnknownMonad(PolycatError):
    """Builtin name or pipeline step is not recognised"""


class MalformedOperation(PolycatError):
    """An operation code cannot be decoded or does not fit the requested slot"""

    def __init__(self, message, code=None):
        super().__init__(message)
        self.code = code


class LawViolation(PolycatError):
    """A monad, morphism or algebra fails a law on a concrete composite"""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness or {}


class DefinitionError(PolycatError):
    """Syntax or semantic error in a monad definition document"""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"line {line}, column {column or 1}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class ClassifierKindError(PolycatError):
    """The requested classifier kind cannot be built for this monad"""


class HypothesisNotMet(PolycatError):
    """An analysis was asked to run where its precondition fails"""


class ConsistencyViolation(PolycatError):
    """Two certificates contradict each other; this signals a bug, not a verdict"""


class BudgetExhausted(PolycatError):
    """A bounded search ran out of budget; callers turn this into UNKNOWN"""

    def __init__(self, resource, limit):
        super().__init__(f"budget exhausted: {resource} > {limit}")
        self.resource = resource
        self.limit = limit
