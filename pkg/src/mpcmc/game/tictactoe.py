"""Tic-tac-toe on a 3x3 grid; X moves first and plays the WHITE role."""
from __future__ import annotations

from dataclasses import dataclass

from .types import ONGOING, Color, DrawReason, IllegalMove, TerminalStatus, draw, win

LINES = ((0, 1, 2), (3, 4, 5), (6, 7, 8),
         (0, 3, 6), (1, 4, 7), (2, 5, 8),
         (0, 4, 8), (2, 4, 6))


@dataclass(frozen=True)
class TTTState:
    """Nine cells holding 0 (empty), 1 (X) or -1 (O), plus the side to move."""

    cells: tuple[int, ...] = (0,) * 9
    turn: int = 1

    def __str__(self) -> str:
        marks = {0: ".", 1: "X", -1: "O"}
        return "".join(marks[c] for c in self.cells) + (" x" if self.turn == 1 else " o")

    @classmethod
    def from_string(cls, text: str) -> "TTTState":
        """Parse ``"XO.......[ x|o]"``; side to move defaults from the mark counts."""
        board, _, side = text.partition(" ")
        cells = tuple({".": 0, "X": 1, "O": -1}[ch] for ch in board.upper())
        if len(cells) != 9:
            raise ValueError(f"expected 9 cells in {text!r}")
        if side:
            turn = 1 if side.lower() == "x" else -1
        else:
            turn = 1 if cells.count(1) == cells.count(-1) else -1
        return cls(cells, turn)

    def swapped(self) -> "TTTState":
        """Same position with the X and O roles exchanged."""
        return TTTState(tuple(-c for c in self.cells), -self.turn)


def line_winner(cells) -> int:
    for a, b, c in LINES:
        if cells[a] and cells[a] == cells[b] == cells[c]:
            return cells[a]
    return 0


class TicTacToe:
    name = "tictactoe"

    def initial_state(self) -> TTTState:
        return TTTState()

    def legal_moves(self, state: TTTState) -> list[int]:
        if line_winner(state.cells):
            return []
        return [i for i, c in enumerate(state.cells) if c == 0]

    def apply_move(self, state: TTTState, move: int) -> TTTState:
        if move not in self.legal_moves(state):
            raise IllegalMove(f"cell {move} is not playable in {state}")
        cells = list(state.cells)
        cells[move] = state.turn
        return TTTState(tuple(cells), -state.turn)

    def terminal_status(self, state: TTTState) -> TerminalStatus:
        w = line_winner(state.cells)
        if w:
            return win(Color(w))
        if 0 not in state.cells:
            return draw(DrawReason.STALEMATE)
        return ONGOING

    def side_to_move(self, state: TTTState) -> Color:
        return Color(state.turn)

    def state_key(self, state: TTTState) -> str:
        return str(state)

    def move_text(self, move: int) -> str:
        return str(move)

    def parse_move(self, state: TTTState, text: str) -> int:
        return int(text)


TICTACTOE = TicTacToe()
