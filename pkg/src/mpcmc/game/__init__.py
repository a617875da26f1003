from .chess import (
    CHESS,
    START_FEN,
    ChessGame,
    IllegalPosition,
    MalformedFen,
    Move,
    Position,
    apply_move,
    apply_moves,
    in_check,
    legal_moves,
    parse_fen,
    parse_san,
    perft,
    san,
    start_position,
    terminal_status,
    to_fen,
)
from .tictactoe import TICTACTOE, TicTacToe, TTTState
from .trajectory import Trajectory
from .types import ONGOING, Color, DrawReason, Game, GameError, IllegalMove, TerminalStatus

__all__ = [
    "CHESS", "START_FEN", "ChessGame", "IllegalPosition", "MalformedFen", "Move",
    "Position", "apply_move", "apply_moves", "in_check", "legal_moves", "parse_fen",
    "parse_san", "perft", "san", "start_position", "terminal_status", "to_fen",
    "TICTACTOE", "TicTacToe", "TTTState", "Trajectory", "ONGOING", "Color",
    "DrawReason", "Game", "GameError", "IllegalMove", "TerminalStatus",
]
