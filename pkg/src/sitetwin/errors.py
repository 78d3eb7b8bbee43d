"""Exception types shared across the engine."""


class SiteTwinError(Exception):
    """Base class for all engine errors."""


class CycleDetected(SiteTwinError):
    """The precedence graph contains a cycle; ``cycle`` holds one offending path."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("precedence cycle: " + " -> ".join(self.cycle))


class DanglingEdge(SiteTwinError):
    """An edge references an activity id that is not in the network."""


class DuplicateId(SiteTwinError):
    """Two activities share the same id."""


class MissingDuration(SiteTwinError):
    """cpm_pass was given a duration map that does not cover every activity."""


class UnknownNode(SiteTwinError):
    """A graph operation referenced an unregistered node."""


class UnknownActivity(SiteTwinError):
    """A scenario or evidence record referenced an activity not in the network."""


class SchemaViolation(SiteTwinError):
    """An ingested file failed validation; carries the offending row/column."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        detail = message
        if row is not None:
            detail += f" (row {row}"
            detail += f", column {column!r})" if column else ")"
        super().__init__(detail)
