"""Exception hierarchy shared by all tracelab modules."""


class TracelabError(Exception):
    """Base class for every error raised by tracelab."""


class InvalidParams(TracelabError, ValueError):
    """(p, q) is not a pair of coprime integers greater than one."""


class ParseError(TracelabError, ValueError):
    """Malformed textual input (rational, configuration, range, edge list)."""


class GraphFormatError(ParseError):
    pass


class BudgetExceeded(TracelabError):
    """An enumeration would exceed the configured work cap."""

    def __init__(self, required, budget):
        self.required = required
        self.budget = budget
        super().__init__(f"enumeration needs {required} units of work, budget is {budget}")


class NonTerminating(TracelabError, ValueError):
    """The rational has no terminating base-pq expansion."""


class LeftTailNonzero(TracelabError, ValueError):
    """The configuration does not represent a finite real number."""


class UndefinedTriple(TracelabError, KeyError):
    """A triple outside the realizable set was fed to the left-determination rule."""


class ConsistencyViolation(TracelabError, AssertionError):
    """A computed object contradicts a property that is a theorem for these automata.

    Seeing this exception means there is a bug, not bad input.
    """


class ShapeViolation(ConsistencyViolation):
    pass


class CounterexampleFound(ConsistencyViolation):
    pass


class CollisionFound(ConsistencyViolation):
    pass


class NoChoiceExists(ConsistencyViolation):
    pass


class NonIntegral(ConsistencyViolation):
    pass
