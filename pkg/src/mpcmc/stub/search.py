"""Material evaluation and exact fixed-depth alpha-beta for the stub engine."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..game import chess as ch
from ..game.chess import Move, Position
from ..uci.score import MATE_BASE, MATE_THRESHOLD

DEFAULT_VALUES = {ch.PAWN: 100, ch.KNIGHT: 300, ch.BISHOP: 300, ch.ROOK: 500, ch.QUEEN: 900}

INF = MATE_BASE + 1


@dataclass
class StubParams:
    depth: int = 2
    values: dict[int, int] = field(default_factory=lambda: dict(DEFAULT_VALUES))
    name: str = "mpcmc-stub"
    fault: str | None = None

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("stub depth must be >= 1")
        if any(v <= 0 for v in self.values.values()):
            raise ValueError("piece values must be positive")


@dataclass
class StubResult:
    move: Move
    score: int
    depth: int
    nodes: int

    @property
    def uci_score(self) -> str:
        """``cp x`` or ``mate n`` as printed on the wire (side-to-move relative)."""
        if self.score >= MATE_THRESHOLD:
            return f"mate {(MATE_BASE - self.score + 1) // 2}"
        if self.score <= -MATE_THRESHOLD:
            return f"mate -{(MATE_BASE + self.score) // 2}"
        return f"cp {self.score}"


def material_eval(pos: Position, values: dict[int, int] | None = None) -> int:
    """Own material minus the opponent's, in centipawns, kings excluded."""
    values = values or DEFAULT_VALUES
    total = 0
    for p in pos.board:
        if p and p != 6 and p != -6:
            total += values[p] if p > 0 else -values[-p]
    return total * pos.turn


class _Searcher:
    def __init__(self, values: dict[int, int]):
        self.values = values
        self.nodes = 0

    def negamax(self, pos: Position, depth: int, ply: int, alpha: int, beta: int) -> int:
        self.nodes += 1
        status = ch.terminal_status(pos)
        if status.kind == "win":
            return -(MATE_BASE - ply)
        if status.kind == "draw":
            return 0
        if depth == 0:
            return material_eval(pos, self.values)
        best = -INF
        board = pos.board
        # captures first; the order only affects speed, never the value
        codes = sorted(ch._legal_codes(pos), key=lambda c: -abs(board[(c >> 6) & 63]))
        for code in codes:
            v = -self.negamax(ch._apply_code(pos, code), depth - 1, ply + 1, -beta, -alpha)
            if v > best:
                best = v
                if v > alpha:
                    alpha = v
                    if alpha >= beta:
                        break
        return best


def search_fixed_depth(pos: Position, depth: int, values: dict[int, int] | None = None) -> StubResult:
    """Best move and exact negamax value at ``depth`` plies.

    Ties go to the first move in canonical (coordinate text) order.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    moves = ch.legal_moves(pos)
    if not moves:
        raise ValueError("no legal moves to search")
    searcher = _Searcher(values or DEFAULT_VALUES)
    best_move, best, alpha = None, -INF, -INF
    for m in moves:
        v = -searcher.negamax(ch._apply_code(pos, m.code), depth - 1, 1, -INF, -alpha)
        if v > best:
            best_move, best = m, v
            alpha = max(alpha, v)
    return StubResult(best_move, best, depth, searcher.nodes)


def negamax_value(pos: Position, depth: int, values: dict[int, int] | None = None, ply: int = 0) -> int:
    """Plain full-width negamax without pruning; reference for tests."""
    status = ch.terminal_status(pos)
    if status.kind == "win":
        return -(MATE_BASE - ply)
    if status.kind == "draw":
        return 0
    if depth == 0:
        return material_eval(pos, values)
    return max(-negamax_value(ch.apply_move(pos, m), depth - 1, values, ply + 1)
               for m in ch.legal_moves(pos))
