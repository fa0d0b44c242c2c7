"""Exception hierarchy.

Two families: ``OrbitlineError`` for genuine failures (bad input, violated
preconditions, exhausted budgets) and ``Inconclusive`` for searches that ran
to completion without producing an answer. The CLI maps the first family to
exit status 1 and the second to exit status 2.
"""


class OrbitlineError(Exception):
    pass


class DegreeTooLow(OrbitlineError, ValueError):
    pass


class NotInvertible(OrbitlineError, ValueError):
    pass


class BadIndex(OrbitlineError, IndexError):
    pass


class PreconditionViolated(OrbitlineError, ValueError):
    pass


class DegreeMismatch(PreconditionViolated):
    pass


class MonomialEquivalentInput(PreconditionViolated):
    pass


class DegreeSumTooLow(PreconditionViolated):
    pass


class HypothesisViolated(PreconditionViolated):
    pass


class PreperiodicBase(PreconditionViolated):
    def __init__(self, message, *, which=None, depth=None):
        super().__init__(message)
        self.which = which
        self.depth = depth


class InsufficientSupport(OrbitlineError, ValueError):
    pass


class BudgetExceeded(OrbitlineError, RuntimeError):
    """A word-count or digit budget was hit. ``partial`` holds whatever was
    computed before the cap bound, when the caller can use it."""

    def __init__(self, message, *, partial=None, usage=None):
        super().__init__(message)
        self.partial = partial
        self.usage = usage or {}


class ParseError(OrbitlineError, ValueError):
    def __init__(self, message, *, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(OrbitlineError, ValueError):
    def __init__(self, message, *, field=None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field


class Inconclusive(Exception):
    """A search or criterion finished within its bounds without an answer."""

    def __init__(self, message, *, bounds=None, partial=None):
        super().__init__(message)
        self.bounds = bounds or {}
        self.partial = partial


class NotFound(Inconclusive):
    pass


class NoSolution(Inconclusive):
    pass


class InconclusiveHeights(Inconclusive):
    pass


class DepthCapExceeded(Inconclusive):
    """The depth cap bound before the target error was met. ``partial`` is the
    best HeightEstimate reached, with an honest error bound."""
