"""Engine scores and their single conversion to a canonical, larger-is-better integer."""
from __future__ import annotations

import enum
from dataclasses import dataclass

from ..game.types import Color, TerminalStatus

MATE_BASE = 1_000_000
# normalized values at or beyond this magnitude encode forced mates
MATE_THRESHOLD = MATE_BASE - 100_000


class ScoreKind(str, enum.Enum):
    CENTIPAWNS = "cp"
    MATE = "mate"


@dataclass(frozen=True)
class Score:
    """An evaluation favorable-positive for ``perspective``.

    ``MATE`` scores carry the number of moves until ``perspective`` mates;
    magnitude 0 is reserved for positions that are already checkmate.
    """

    kind: ScoreKind
    magnitude: int
    perspective: Color

    def __post_init__(self):
        if self.kind is ScoreKind.MATE and self.magnitude < 0:
            raise ValueError("mate distance must be non-negative; flip the perspective instead")

    @classmethod
    def cp(cls, value: int, perspective: Color) -> "Score":
        return cls(ScoreKind.CENTIPAWNS, int(value), perspective)

    @classmethod
    def mate(cls, moves: int, perspective: Color) -> "Score":
        return cls(ScoreKind.MATE, int(moves), perspective)

    @classmethod
    def from_uci(cls, kind: str, value: int, side_to_move: Color) -> "Score":
        """Convert an ``info score cp|mate`` pair, which is relative to the side to move."""
        if kind == "cp":
            return cls.cp(value, side_to_move)
        if kind == "mate":
            if value > 0:
                return cls.mate(value, side_to_move)
            # mate 0: the side to move is already mated
            return cls.mate(-value, side_to_move.opposite)
        raise ValueError(f"unknown score kind {kind!r}")

    def __str__(self) -> str:
        who = self.perspective.name.lower()
        if self.kind is ScoreKind.MATE:
            return f"mate {self.magnitude} for {who}"
        return f"cp {self.magnitude:+d} for {who}"


def normalize_score(score: Score, for_color: Color) -> int:
    if score.kind is ScoreKind.MATE:
        value = MATE_BASE - score.magnitude
    else:
        value = score.magnitude
    return value if score.perspective == for_color else -value


def terminal_score(status: TerminalStatus, side_to_move: Color) -> Score:
    """Canonical score of a finished game: mate-in-0 for the winner, or an exact draw."""
    if status.kind == "win":
        return Score.mate(0, status.winner)
    if status.kind == "draw":
        return Score.cp(0, side_to_move)
    raise ValueError("position is not terminal")


def is_mate_value(value: int) -> bool:
    return abs(value) >= MATE_THRESHOLD


def mate_plies(score: Score, side_to_move: Color) -> int:
    """Plies until the mate announced by a ``MATE`` score, counted from the scored position."""
    if score.perspective == side_to_move:
        return 2 * score.magnitude - 1
    return 2 * score.magnitude


def root_relative(score: Score, for_color: Color, plies: int, side_to_move: Color) -> int:
    """Canonical value of a score taken ``plies`` half-moves below the decision point.

    Centipawns normalize as usual.  Mates become ``MATE_BASE - d`` (win) or
    ``-(MATE_BASE - d)`` (loss), where ``d`` counts plies from the decision
    point, so mates found at different lookahead depths compare correctly.
    """
    if score.kind is ScoreKind.CENTIPAWNS:
        return normalize_score(score, for_color)
    value = MATE_BASE - (plies + mate_plies(score, side_to_move))
    return value if score.perspective == for_color else -value
