from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .chess import CHESS, START_FEN, Position, parse_fen, to_fen
from .types import Game


@dataclass(frozen=True)
class Trajectory:
    """A start state plus the moves played from it.

    Engines are always given the full move list so that their repetition
    bookkeeping matches ours.
    """

    start: Any
    moves: tuple = ()
    game: Game = field(default=CHESS, compare=False, repr=False)

    @classmethod
    def from_fen(cls, fen: str = START_FEN, moves=()) -> "Trajectory":
        start = parse_fen(fen)
        traj = cls(start)
        for m in moves:
            traj = traj.extend(CHESS.parse_move(traj.final, m) if isinstance(m, str) else m)
        return traj

    @property
    def final(self) -> Any:
        cached = self.__dict__.get("_final")
        if cached is None:
            state = self.start
            for m in self.moves:
                state = self.game.apply_move(state, m)
            object.__setattr__(self, "_final", state)
            cached = state
        return cached

    def extend(self, *moves) -> "Trajectory":
        state = self.final
        for m in moves:
            state = self.game.apply_move(state, m)
        traj = Trajectory(self.start, self.moves + tuple(moves), self.game)
        object.__setattr__(traj, "_final", state)
        return traj

    def position_command(self) -> str:
        """The UCI ``position`` command for this trajectory."""
        if not isinstance(self.start, Position):
            raise TypeError("only chess trajectories can be sent to UCI engines")
        fen = to_fen(self.start)
        head = "position startpos" if fen == START_FEN else f"position fen {fen}"
        if self.moves:
            head += " moves " + " ".join(self.game.move_text(m) for m in self.moves)
        return head

    def __len__(self) -> int:
        return len(self.moves)
