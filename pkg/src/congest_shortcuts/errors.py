"""Exception hierarchy shared by every module."""

from __future__ import annotations


class ShortcutError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(ShortcutError, ValueError):
    pass


class UnsupportedParameter(InvalidArgument):
    pass


class MalformedOperand(InvalidArgument):
    pass


class GenerationFailed(ShortcutError):
    pass


class PreconditionViolated(ShortcutError):
    pass


class TooLarge(ShortcutError):
    pass


class NoSpanningTree(ShortcutError):
    pass


class SimulationFault(ShortcutError):
    """Raised when a node program breaks the CONGEST rules.

    ``round`` and ``edge`` name the offending round and directed edge when
    the fault is a bandwidth violation.
    """

    def __init__(self, message: str, round: int | None = None, edge: tuple[int, int] | None = None):
        super().__init__(message)
        self.round = round
        self.edge = edge

    def to_dict(self) -> dict:
        return {
            "fault": type(self).__name__,
            "message": str(self),
            "round": self.round,
            "edge": list(self.edge) if self.edge is not None else None,
        }


class TimeoutFault(SimulationFault):
    pass
