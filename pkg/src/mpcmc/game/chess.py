"""Chess rules: immutable positions, FEN, legal move generation, SAN and perft.

Squares are 0..63 with a1 = 0, h1 = 7, a8 = 56.  Pieces are signed ints,
positive for white: 1 pawn, 2 knight, 3 bishop, 4 rook, 5 queen, 6 king.
Moves are handled internally as ints ``from | to << 6 | promo << 12`` and
exposed as :class:`Move` values ordered by their coordinate text.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable

from .types import (
    ONGOING,
    Color,
    DrawReason,
    GameError,
    IllegalMove,
    TerminalStatus,
    draw,
    win,
)

PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING = 1, 2, 3, 4, 5, 6

PIECE_LETTERS = {PAWN: "p", KNIGHT: "n", BISHOP: "b", ROOK: "r", QUEEN: "q", KING: "k"}
LETTER_PIECES = {v: k for k, v in PIECE_LETTERS.items()}

START_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"

WK, WQ, BK, BQ = 1, 2, 4, 8


class MalformedFen(GameError):
    pass


class IllegalPosition(GameError):
    pass


def square_name(sq: int) -> str:
    return "abcdefgh"[sq & 7] + str((sq >> 3) + 1)


def parse_square(text: str) -> int:
    if len(text) != 2 or text[0] not in "abcdefgh" or text[1] not in "12345678":
        raise ValueError(f"bad square {text!r}")
    return (int(text[1]) - 1) * 8 + "abcdefgh".index(text[0])


# --- precomputed geometry -------------------------------------------------

_DIRS = [(0, 1), (0, -1), (1, 0), (-1, 0), (1, 1), (-1, 1), (1, -1), (-1, -1)]


def _ray(sq: int, df: int, dr: int) -> tuple[int, ...]:
    f, r = sq & 7, sq >> 3
    out = []
    f, r = f + df, r + dr
    while 0 <= f < 8 and 0 <= r < 8:
        out.append(r * 8 + f)
        f, r = f + df, r + dr
    return tuple(out)


def _jumps(sq: int, deltas) -> tuple[int, ...]:
    f, r = sq & 7, sq >> 3
    return tuple(
        (r + dr) * 8 + f + df
        for df, dr in deltas
        if 0 <= f + df < 8 and 0 <= r + dr < 8
    )


RAYS = [[_ray(sq, df, dr) for df, dr in _DIRS] for sq in range(64)]
ORTHO_RAYS = [RAYS[sq][:4] for sq in range(64)]
DIAG_RAYS = [RAYS[sq][4:] for sq in range(64)]
KNIGHT_TARGETS = [
    _jumps(sq, [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)])
    for sq in range(64)
]
KING_TARGETS = [_jumps(sq, _DIRS) for sq in range(64)]
# squares from which a pawn of the given color attacks sq
PAWN_ATTACKERS = {
    1: [_jumps(sq, [(-1, -1), (1, -1)]) for sq in range(64)],
    -1: [_jumps(sq, [(-1, 1), (1, 1)]) for sq in range(64)],
}
# squares a pawn of the given color on sq attacks
PAWN_CAPTURES = {
    1: [_jumps(sq, [(-1, 1), (1, 1)]) for sq in range(64)],
    -1: [_jumps(sq, [(-1, -1), (1, -1)]) for sq in range(64)],
}

_CASTLE_MASK = [15] * 64
_CASTLE_MASK[4] = 15 & ~(WK | WQ)
_CASTLE_MASK[7] = 15 & ~WK
_CASTLE_MASK[0] = 15 & ~WQ
_CASTLE_MASK[60] = 15 & ~(BK | BQ)
_CASTLE_MASK[63] = 15 & ~BK
_CASTLE_MASK[56] = 15 & ~BQ


def _attacked(board, sq: int, by: int, ignore: int = -1) -> bool:
    """True if side ``by`` attacks ``sq``; ``ignore`` is treated as empty."""
    n = 2 * by
    for t in KNIGHT_TARGETS[sq]:
        if board[t] == n:
            return True
    k = 6 * by
    for t in KING_TARGETS[sq]:
        if board[t] == k:
            return True
    p = by
    for t in PAWN_ATTACKERS[by][sq]:
        if board[t] == p:
            return True
    r, q, b = 4 * by, 5 * by, 3 * by
    for ray in ORTHO_RAYS[sq]:
        for t in ray:
            piece = board[t]
            if piece and t != ignore:
                if piece == r or piece == q:
                    return True
                break
    for ray in DIAG_RAYS[sq]:
        for t in ray:
            piece = board[t]
            if piece and t != ignore:
                if piece == b or piece == q:
                    return True
                break
    return False


# --- moves ----------------------------------------------------------------


@dataclass(frozen=True, repr=False)
class Move:
    """A chess move in coordinate notation; ordering follows the text."""

    origin: int
    destination: int
    promotion: int | None = None

    @property
    def uci(self) -> str:
        text = square_name(self.origin) + square_name(self.destination)
        if self.promotion:
            text += PIECE_LETTERS[self.promotion]
        return text

    def __str__(self) -> str:
        return self.uci

    def __repr__(self) -> str:
        return f"Move({self.uci!r})"

    def __lt__(self, other: "Move") -> bool:
        return self.uci < other.uci

    @property
    def code(self) -> int:
        return self.origin | self.destination << 6 | (self.promotion or 0) << 12

    @classmethod
    def from_uci(cls, text: str) -> "Move":
        text = text.strip()
        if len(text) not in (4, 5):
            raise ValueError(f"bad move text {text!r}")
        promo = None
        if len(text) == 5:
            if text[4] not in "nbrq":
                raise ValueError(f"bad promotion in {text!r}")
            promo = LETTER_PIECES[text[4]]
        return cls(parse_square(text[:2]), parse_square(text[2:4]), promo)


_MOVE_CACHE: dict[int, Move] = {}


def _move_of(code: int) -> Move:
    m = _MOVE_CACHE.get(code)
    if m is None:
        m = Move(code & 63, (code >> 6) & 63, (code >> 12) or None)
        _MOVE_CACHE[code] = m
    return m


# --- positions ------------------------------------------------------------


class Position:
    """Immutable chess position including the repetition history.

    ``history`` holds the keys of every position since the last capture or
    pawn move, ending with this position's own key.
    """

    __slots__ = ("board", "turn", "castling", "ep", "halfmove", "fullmove",
                 "history", "_codes", "_key")

    def __init__(self, board: tuple, turn: int, castling: int, ep: int,
                 halfmove: int, fullmove: int, history: tuple | None = None):
        self.board = board
        self.turn = turn
        self.castling = castling
        self.ep = ep
        self.halfmove = halfmove
        self.fullmove = fullmove
        self._codes = None
        self._key = None
        self.history = (history or ()) + (self.key,)

    @property
    def side_to_move(self) -> Color:
        return Color(self.turn)

    @property
    def key(self) -> Hashable:
        """Repetition key: placement, side, castling rights, and en passant only if capturable."""
        if self._key is None:
            ep = self.ep
            if ep >= 0 and self.turn not in [self.board[s] for s in PAWN_ATTACKERS[self.turn][ep]]:
                ep = -1
            if ep >= 0 and not any(
                (c >> 6) & 63 == ep and abs(self.board[c & 63]) == PAWN
                for c in _legal_codes(self)
            ):
                ep = -1
            self._key = (self.board, self.turn, self.castling, ep)
        return self._key

    def repetitions(self) -> int:
        return self.history.count(self.key)

    def piece_at(self, sq: int) -> int:
        return self.board[sq]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Position):
            return NotImplemented
        return (self.board == other.board and self.turn == other.turn
                and self.castling == other.castling and self.ep == other.ep
                and self.halfmove == other.halfmove and self.fullmove == other.fullmove
                and self.history == other.history)

    def __hash__(self) -> int:
        return hash((self.board, self.turn, self.castling, self.ep, self.halfmove, self.fullmove))

    def __repr__(self) -> str:
        return f"Position({to_fen(self)!r})"


def _legal_codes(pos: Position) -> list[int]:
    codes = pos._codes
    if codes is None:
        codes = _generate(pos)
        pos._codes = codes
    return codes


def _generate(pos: Position) -> list[int]:
    board = pos.board
    us = pos.turn
    them = -us
    ksq = board.index(6 * us)

    # checkers, check-blocking squares and absolute pins, by scanning out from the king
    n_checkers = 0
    block: set[int] | None = None
    pins: dict[int, tuple[int, ...]] = {}
    for d in range(8):
        ray = RAYS[ksq][d]
        sliders = (4 * them, 5 * them) if d < 4 else (3 * them, 5 * them)
        own = -1
        for i, t in enumerate(ray):
            p = board[t]
            if not p:
                continue
            if p * us > 0:
                if own >= 0:
                    break
                own = t
                continue
            if p in sliders:
                if own >= 0:
                    pins[own] = ray[: i + 1]
                else:
                    n_checkers += 1
                    block = set(ray[: i + 1])
            break
    for t in KNIGHT_TARGETS[ksq]:
        if board[t] == 2 * them:
            n_checkers += 1
            block = {t}
    for t in PAWN_ATTACKERS[them][ksq]:
        if board[t] == them:
            n_checkers += 1
            block = {t}

    out: list[int] = []
    append = out.append

    # king steps
    for t in KING_TARGETS[ksq]:
        if board[t] * us <= 0 and not _attacked(board, t, them, ksq):
            append(ksq | t << 6)

    if n_checkers >= 2:
        return out

    if n_checkers == 0:
        c = pos.castling
        if us == 1:
            if c & WK and not board[5] and not board[6] and board[7] == 4 \
                    and not _attacked(board, 5, them) and not _attacked(board, 6, them):
                append(4 | 6 << 6)
            if c & WQ and not board[3] and not board[2] and not board[1] and board[0] == 4 \
                    and not _attacked(board, 3, them) and not _attacked(board, 2, them):
                append(4 | 2 << 6)
        else:
            if c & BK and not board[61] and not board[62] and board[63] == -4 \
                    and not _attacked(board, 61, them) and not _attacked(board, 62, them):
                append(60 | 62 << 6)
            if c & BQ and not board[59] and not board[58] and not board[57] and board[56] == -4 \
                    and not _attacked(board, 59, them) and not _attacked(board, 58, them):
                append(60 | 58 << 6)

    push = 8 * us
    start_rank = 1 if us == 1 else 6
    promo_rank = 7 if us == 1 else 0
    ep = pos.ep

    for sq in range(64):
        p = board[sq] * us
        if p <= 0 or p == 6:
            continue
        pin = pins.get(sq)
        if p == 1:
            targets = []
            t = sq + push
            if not board[t]:
                targets.append(t)
                if sq >> 3 == start_rank and not board[t + push]:
                    targets.append(t + push)
            for t in PAWN_CAPTURES[us][sq]:
                if board[t] * us < 0:
                    targets.append(t)
                elif t == ep:
                    if _ep_legal(board, sq, t, us, ksq):
                        append(sq | t << 6)
            for t in targets:
                if block is not None and t not in block:
                    continue
                if pin is not None and t not in pin:
                    continue
                if t >> 3 == promo_rank:
                    base = sq | t << 6
                    append(base | QUEEN << 12)
                    append(base | ROOK << 12)
                    append(base | BISHOP << 12)
                    append(base | KNIGHT << 12)
                else:
                    append(sq | t << 6)
            continue
        if p == 2:
            if pin is not None:
                continue
            for t in KNIGHT_TARGETS[sq]:
                if board[t] * us <= 0 and (block is None or t in block):
                    append(sq | t << 6)
            continue
        rays = ORTHO_RAYS[sq] if p == 4 else DIAG_RAYS[sq] if p == 3 else RAYS[sq]
        for ray in rays:
            for t in ray:
                q = board[t] * us
                if q > 0:
                    break
                if (block is None or t in block) and (pin is None or t in pin):
                    append(sq | t << 6)
                if q < 0:
                    break
    return out


def _ep_legal(board, sq: int, t: int, us: int, ksq: int) -> bool:
    b = list(board)
    b[t] = b[sq]
    b[sq] = 0
    b[t - 8 * us] = 0
    return not _attacked(b, ksq, -us)


def _apply_code(pos: Position, code: int) -> Position:
    b = list(pos.board)
    us = pos.turn
    fr = code & 63
    to = (code >> 6) & 63
    promo = code >> 12
    p = b[fr]
    captured = b[to]
    b[fr] = 0
    ap = p if p > 0 else -p
    ep = -1
    if ap == 1:
        if to == pos.ep:
            b[to - 8 * us] = 0
            captured = -us
        elif to - fr == 16 or fr - to == 16:
            ep = (fr + to) >> 1
        if promo:
            p = promo * us
    elif ap == 6 and (to - fr == 2 or fr - to == 2):
        if to > fr:
            b[fr + 1] = b[fr + 3]
            b[fr + 3] = 0
        else:
            b[fr - 1] = b[fr - 4]
            b[fr - 4] = 0
    b[to] = p
    castling = pos.castling & _CASTLE_MASK[fr] & _CASTLE_MASK[to]
    if ap == 1 or captured:
        halfmove, history = 0, None
    else:
        halfmove, history = pos.halfmove + 1, pos.history
    fullmove = pos.fullmove + 1 if us == -1 else pos.fullmove
    return Position(tuple(b), -us, castling, ep, halfmove, fullmove, history)


# --- public operations ----------------------------------------------------


def parse_fen(text: str) -> Position:
    if text.strip() == "startpos":
        text = START_FEN
    fields = text.split()
    if not 4 <= len(fields) <= 6:
        raise MalformedFen(f"expected 4-6 fields, got {len(fields)}: {text!r}")
    placement, side, castle, ep_text = fields[:4]
    ranks = placement.split("/")
    if len(ranks) != 8:
        raise MalformedFen(f"expected 8 ranks in {placement!r}")
    board = [0] * 64
    for i, rank_text in enumerate(ranks):
        rank = 7 - i
        f = 0
        for ch in rank_text:
            if ch.isdigit():
                if ch in "09":
                    raise MalformedFen(f"bad empty-run {ch!r}")
                f += int(ch)
            elif ch.lower() in LETTER_PIECES:
                if f > 7:
                    raise MalformedFen(f"rank {rank + 1} overflows")
                piece = LETTER_PIECES[ch.lower()]
                board[rank * 8 + f] = piece if ch.isupper() else -piece
                f += 1
            else:
                raise MalformedFen(f"bad piece letter {ch!r}")
        if f != 8:
            raise MalformedFen(f"rank {rank + 1} has {f} files")
    if side not in ("w", "b"):
        raise MalformedFen(f"bad side to move {side!r}")
    turn = 1 if side == "w" else -1
    castling = 0
    if castle != "-":
        for ch in castle:
            bit = {"K": WK, "Q": WQ, "k": BK, "q": BQ}.get(ch)
            if bit is None or castling & bit:
                raise MalformedFen(f"bad castling field {castle!r}")
            castling |= bit
    if ep_text == "-":
        ep = -1
    else:
        try:
            ep = parse_square(ep_text)
        except ValueError as exc:
            raise MalformedFen(str(exc)) from None
    try:
        halfmove = int(fields[4]) if len(fields) > 4 else 0
        fullmove = int(fields[5]) if len(fields) > 5 else 1
    except ValueError:
        raise MalformedFen(f"bad move counters in {text!r}") from None
    if halfmove < 0 or fullmove < 1:
        raise MalformedFen(f"bad move counters in {text!r}")

    _validate(board, turn, castling, ep)
    return Position(tuple(board), turn, castling, ep, halfmove, fullmove)


def _validate(board: list, turn: int, castling: int, ep: int) -> None:
    if board.count(6) != 1 or board.count(-6) != 1:
        raise IllegalPosition("each side needs exactly one king")
    for sq in list(range(8)) + list(range(56, 64)):
        if abs(board[sq]) == PAWN:
            raise IllegalPosition(f"pawn on back rank at {square_name(sq)}")
    if _attacked(board, board.index(-6 * turn), turn):
        raise IllegalPosition("side not to move is in check")
    needs = {WK: (4, 7, 1), WQ: (4, 0, 1), BK: (60, 63, -1), BQ: (60, 56, -1)}
    for bit, (k, r, color) in needs.items():
        if castling & bit and (board[k] != 6 * color or board[r] != 4 * color):
            raise IllegalPosition("castling rights without king and rook on home squares")
    if ep >= 0:
        rank = ep >> 3
        pawn_sq = ep - 8 * turn
        if (rank != (5 if turn == 1 else 2) or board[ep] or board[ep + 8 * turn]
                or board[pawn_sq] != -turn):
            raise IllegalPosition(f"inconsistent en passant square {square_name(ep)}")


def to_fen(pos: Position) -> str:
    rows = []
    for rank in range(7, -1, -1):
        row, empty = "", 0
        for f in range(8):
            p = pos.board[rank * 8 + f]
            if not p:
                empty += 1
                continue
            if empty:
                row += str(empty)
                empty = 0
            letter = PIECE_LETTERS[abs(p)]
            row += letter.upper() if p > 0 else letter
        if empty:
            row += str(empty)
        rows.append(row)
    castle = "".join(ch for bit, ch in ((WK, "K"), (WQ, "Q"), (BK, "k"), (BQ, "q"))
                     if pos.castling & bit) or "-"
    ep = square_name(pos.ep) if pos.ep >= 0 else "-"
    side = "w" if pos.turn == 1 else "b"
    return f"{'/'.join(rows)} {side} {castle} {ep} {pos.halfmove} {pos.fullmove}"


def start_position() -> Position:
    return parse_fen(START_FEN)


def legal_moves(pos: Position) -> list[Move]:
    return sorted((_move_of(c) for c in _legal_codes(pos)), key=_uci_key)


def _uci_key(m: Move) -> str:
    return m.uci


def apply_move(pos: Position, move: Move | str) -> Position:
    if isinstance(move, str):
        try:
            move = Move.from_uci(move)
        except ValueError as exc:
            raise IllegalMove(str(exc)) from None
    code = move.code
    if code not in _legal_codes(pos):
        raise IllegalMove(f"{move} is not legal in {to_fen(pos)}")
    return _apply_code(pos, code)


def apply_moves(pos: Position, moves: Iterable[Move | str]) -> Position:
    for m in moves:
        pos = apply_move(pos, m)
    return pos


def in_check(pos: Position) -> bool:
    return _attacked(pos.board, pos.board.index(6 * pos.turn), -pos.turn)


def insufficient_material(board) -> bool:
    minors = []
    for sq, p in enumerate(board):
        ap = abs(p)
        if ap in (PAWN, ROOK, QUEEN):
            return False
        if ap in (KNIGHT, BISHOP):
            minors.append((sq, p))
    if len(minors) <= 1:
        return True
    if len(minors) == 2:
        (s1, p1), (s2, p2) = minors
        if abs(p1) == abs(p2) == BISHOP and p1 == -p2:
            return ((s1 >> 3) + (s1 & 7)) % 2 == ((s2 >> 3) + (s2 & 7)) % 2
    return False


def terminal_status(pos: Position) -> TerminalStatus:
    if not _legal_codes(pos):
        if in_check(pos):
            return win(Color(-pos.turn))
        return draw(DrawReason.STALEMATE)
    if insufficient_material(pos.board):
        return draw(DrawReason.INSUFFICIENT_MATERIAL)
    if pos.repetitions() >= 3:
        return draw(DrawReason.THREEFOLD_REPETITION)
    if pos.halfmove >= 100:
        return draw(DrawReason.FIFTY_MOVE)
    return ONGOING


def perft(pos: Position, depth: int) -> int:
    if depth == 0:
        return 1
    codes = _legal_codes(pos)
    if depth == 1:
        return len(codes)
    return sum(perft(_apply_code(pos, c), depth - 1) for c in codes)


def divide(pos: Position, depth: int) -> dict[str, int]:
    """Per-root-move perft counts, keyed by move text."""
    return {m.uci: perft(_apply_code(pos, m.code), depth - 1) for m in legal_moves(pos)}


# --- SAN ------------------------------------------------------------------


def san(pos: Position, move: Move) -> str:
    code = move.code
    if code not in _legal_codes(pos):
        raise IllegalMove(f"{move} is not legal in {to_fen(pos)}")
    fr, to = move.origin, move.destination
    piece = abs(pos.board[fr])
    if piece == KING and abs(to - fr) == 2:
        text = "O-O" if to > fr else "O-O-O"
    else:
        capture = pos.board[to] != 0 or (piece == PAWN and to == pos.ep)
        if piece == PAWN:
            text = square_name(fr)[0] + "x" if capture else ""
            text += square_name(to)
            if move.promotion:
                text += "=" + PIECE_LETTERS[move.promotion].upper()
        else:
            rivals = [c & 63 for c in _legal_codes(pos)
                      if (c >> 6) & 63 == to and c & 63 != fr
                      and abs(pos.board[c & 63]) == piece]
            disamb = ""
            if rivals:
                if all((r & 7) != (fr & 7) for r in rivals):
                    disamb = square_name(fr)[0]
                elif all((r >> 3) != (fr >> 3) for r in rivals):
                    disamb = square_name(fr)[1]
                else:
                    disamb = square_name(fr)
            text = PIECE_LETTERS[piece].upper() + disamb + ("x" if capture else "") + square_name(to)
    after = _apply_code(pos, code)
    if in_check(after):
        text += "#" if not _legal_codes(after) else "+"
    return text


def parse_san(pos: Position, text: str) -> Move:
    wanted = text.strip().rstrip("+#!?").replace("0-0-0", "O-O-O").replace("0-0", "O-O")
    for m in legal_moves(pos):
        if san(pos, m).rstrip("+#") == wanted:
            return m
    raise IllegalMove(f"no legal move matches SAN {text!r} in {to_fen(pos)}")


# --- game adapter ---------------------------------------------------------


class ChessGame:
    name = "chess"

    def initial_state(self) -> Position:
        return start_position()

    def legal_moves(self, state: Position) -> list[Move]:
        return legal_moves(state)

    def apply_move(self, state: Position, move: Move) -> Position:
        return apply_move(state, move)

    def terminal_status(self, state: Position) -> TerminalStatus:
        return terminal_status(state)

    def side_to_move(self, state: Position) -> Color:
        return Color(state.turn)

    def state_key(self, state: Position) -> Hashable:
        return to_fen(state)

    def move_text(self, move: Move) -> str:
        return move.uci

    def parse_move(self, state: Position, text: str) -> Move:
        return Move.from_uci(text)


CHESS = ChessGame()
