"""Shared game vocabulary: colors, terminal status and the two-player game interface."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Hashable, Protocol, Sequence


class Color(enum.IntEnum):
    WHITE = 1
    BLACK = -1

    @property
    def opposite(self) -> "Color":
        return Color(-self.value)

    @property
    def letter(self) -> str:
        return "w" if self is Color.WHITE else "b"


class DrawReason(str, enum.Enum):
    STALEMATE = "stalemate"
    THREEFOLD_REPETITION = "threefold_repetition"
    FIFTY_MOVE = "fifty_move"
    INSUFFICIENT_MATERIAL = "insufficient_material"
    ADJUDICATED = "adjudicated"


@dataclass(frozen=True)
class TerminalStatus:
    """``ongoing``, ``win`` (with the winning color) or ``draw`` (with a reason)."""

    kind: str
    winner: Color | None = None
    reason: DrawReason | None = None

    @property
    def is_terminal(self) -> bool:
        return self.kind != "ongoing"

    @property
    def is_draw(self) -> bool:
        return self.kind == "draw"

    def value_for(self, color: Color) -> int:
        """+1 / 0 / -1 from ``color``'s point of view; 0 for ongoing."""
        if self.kind == "win":
            return 1 if self.winner == color else -1
        return 0

    def __str__(self) -> str:
        if self.kind == "win":
            return f"win({self.winner.name.lower()})"
        if self.kind == "draw":
            return f"draw({self.reason.value})"
        return "ongoing"


ONGOING = TerminalStatus("ongoing")


def win(color: Color) -> TerminalStatus:
    return TerminalStatus("win", winner=color)


def draw(reason: DrawReason) -> TerminalStatus:
    return TerminalStatus("draw", reason=reason)


class GameError(Exception):
    pass


class IllegalMove(GameError):
    pass


class Game(Protocol):
    """Alternating two-player game as consumed by the oracle and the lookahead policy.

    States are immutable values; ``legal_moves`` returns moves in canonical order,
    which is the tie-break order everywhere downstream.
    """

    name: str

    def initial_state(self) -> Any: ...

    def legal_moves(self, state: Any) -> Sequence[Any]: ...

    def apply_move(self, state: Any, move: Any) -> Any: ...

    def terminal_status(self, state: Any) -> TerminalStatus: ...

    def side_to_move(self, state: Any) -> Color: ...

    def state_key(self, state: Any) -> Hashable: ...

    def move_text(self, move: Any) -> str: ...

    def parse_move(self, state: Any, text: str) -> Any: ...
