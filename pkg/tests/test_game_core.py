import chess
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from mpcmc.game import (
    CHESS,
    START_FEN,
    TICTACTOE,
    Color,
    DrawReason,
    IllegalMove,
    IllegalPosition,
    MalformedFen,
    Move,
    Trajectory,
    TTTState,
    apply_move,
    apply_moves,
    legal_moves,
    parse_fen,
    parse_san,
    perft,
    san,
    start_position,
    terminal_status,
    to_fen,
)
from mpcmc.game.chess import divide

KIWIPETE = "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1"
POS5 = "rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8"
POS6 = "r4rk1/1pp1qppp/p1np1n2/2b1p1B1/2B1P1b1/P1NP1N2/1PP1QPPP/R4RK1 w - - 0 10"


def ref_divide(board, depth):
    out = {}
    for m in board.legal_moves:
        board.push(m)
        out[m.uci()] = sum(1 for _ in _leaves(board, depth - 1))
        board.pop()
    return out


def _leaves(board, depth):
    if depth == 0:
        yield None
        return
    for m in board.legal_moves:
        board.push(m)
        yield from _leaves(board, depth - 1)
        board.pop()


@pytest.mark.parametrize("fen", [START_FEN, KIWIPETE, POS5, POS6])
def test_divide_matches_reference_per_move(fen):
    assert divide(parse_fen(fen), 2) == ref_divide(chess.Board(fen), 2)


def test_published_perft_counts():
    # well-known published values, kept as a second, static reference
    assert [perft(parse_fen(POS5), d) for d in (1, 2, 3)] == [44, 1486, 62379]
    assert [perft(parse_fen(POS6), d) for d in (1, 2)] == [46, 2079]


def test_perft_zero_is_one():
    assert perft(start_position(), 0) == 1


def _random_game(seed, plies):
    import random

    rng = random.Random(seed)
    board = chess.Board()
    pos = start_position()
    for _ in range(plies):
        moves = list(board.legal_moves)
        if not moves or board.is_game_over(claim_draw=False):
            break
        m = rng.choice(moves)
        board.push(m)
        pos = apply_move(pos, m.uci())
    return board, pos


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10**6), st.integers(0, 120))
def test_random_playouts_agree_with_reference(seed, plies):
    board, pos = _random_game(seed, plies)
    assert sorted(m.uci for m in legal_moves(pos)) == sorted(m.uci() for m in board.legal_moves)
    assert to_fen(pos) == board.fen(en_passant="fen")
    assert parse_fen(to_fen(pos)).board == pos.board
    for m in legal_moves(pos):
        assert san(pos, m) == board.san(chess.Move.from_uci(m.uci))
    if board.is_checkmate():
        assert terminal_status(pos).winner == Color(-pos.turn)
    elif board.is_stalemate():
        assert terminal_status(pos).reason is DrawReason.STALEMATE


def test_legal_moves_are_canonically_ordered():
    moves = legal_moves(parse_fen(KIWIPETE))
    assert [m.uci for m in moves] == sorted(m.uci for m in moves)


def test_apply_move_does_not_mutate():
    pos = start_position()
    before = to_fen(pos)
    apply_move(pos, "e2e4")
    assert to_fen(pos) == before


def test_illegal_move_rejected():
    with pytest.raises(IllegalMove):
        apply_move(start_position(), "e2e5")
    # the king may not step onto the second rank, which the rook controls
    with pytest.raises(IllegalMove):
        apply_move(parse_fen("4k3/8/8/8/8/8/r7/4K3 w - - 0 1"), "e1e2")


def test_pinned_piece_cannot_move():
    pos = parse_fen("4k3/4r3/8/8/8/8/4N3/4K3 w - - 0 1")
    assert not any(m.uci.startswith("e2") for m in legal_moves(pos))


@pytest.mark.parametrize("fen", [
    "", "startpos extra", "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP w KQkq - 0 1",
    "rnbqkbnr/pppppppp/9/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1",
    "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR x KQkq - 0 1",
    "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - a 1",
])
def test_malformed_fen(fen):
    with pytest.raises(MalformedFen):
        parse_fen(fen)


@pytest.mark.parametrize("fen", [
    "8/8/8/8/8/8/8/4K3 w - - 0 1",                      # no black king
    "4k3/8/8/8/8/8/8/4KK2 w - - 0 1",                   # two white kings
    "4k3/8/8/8/8/8/8/P3K3 w - - 0 1",                   # pawn on the first rank
    "4k3/4R3/8/8/8/8/8/4K3 w - - 0 1",                  # side not to move is in check
    "4k3/8/8/8/8/8/8/4K3 w K - 0 1",                    # castling right without a rook
])
def test_illegal_positions(fen):
    with pytest.raises(IllegalPosition):
        parse_fen(fen)


def test_startpos_alias():
    assert to_fen(parse_fen("startpos")) == START_FEN


def test_four_field_fen_gets_default_counters():
    assert to_fen(parse_fen("4k3/8/8/8/8/8/8/4K2R w K -")) == "4k3/8/8/8/8/8/8/4K2R w K - 0 1"


def test_checkmate_and_stalemate():
    mated = apply_moves(start_position(), ["f2f3", "e7e5", "g2g4", "d8h4"])
    assert terminal_status(mated).winner is Color.BLACK
    stale = parse_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1")
    assert terminal_status(stale).reason is DrawReason.STALEMATE
    assert chess.Board("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1").is_stalemate()


@pytest.mark.parametrize("fen,dead", [
    ("4k3/8/8/8/8/8/8/4K3 w - - 0 1", True),
    ("4k3/8/8/8/8/8/8/4KB2 w - - 0 1", True),
    ("4k3/8/8/8/8/8/8/4KN2 w - - 0 1", True),
    ("4kb2/8/8/8/8/8/8/2B1K3 w - - 0 1", True),     # bishops on same-colored squares
    ("3kb3/8/8/8/8/8/8/2B1K3 w - - 0 1", False),
    ("4k3/8/8/8/8/8/8/3NKN2 w - - 0 1", False),
    ("4k3/8/8/8/8/8/4P3/4K3 w - - 0 1", False),
])
def test_insufficient_material(fen, dead):
    assert (terminal_status(parse_fen(fen)).reason is DrawReason.INSUFFICIENT_MATERIAL) == dead
    assert chess.Board(fen).is_insufficient_material() == dead


def test_threefold_repetition_by_knight_shuffle():
    shuffle = ["g1f3", "g8f6", "f3g1", "f6g8"]
    pos = apply_moves(start_position(), shuffle)
    assert not terminal_status(pos).is_terminal
    pos = apply_moves(pos, shuffle)
    assert terminal_status(pos).reason is DrawReason.THREEFOLD_REPETITION
    board = chess.Board()
    for m in shuffle * 2:
        board.push_uci(m)
    assert board.is_repetition(3)


def test_uncapturable_ep_square_does_not_break_repetition():
    # after e2e4 the ep square is set but no black pawn can take, so the key ignores it
    a = apply_move(start_position(), "e2e4")
    b = parse_fen("rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq - 0 1")
    assert a.key == b.key
    c = parse_fen("rnbqkbnr/ppp1pppp/8/8/3pP3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1")
    d = parse_fen("rnbqkbnr/ppp1pppp/8/8/3pP3/8/PPPP1PPP/RNBQKBNR b KQkq - 0 1")
    assert c.key != d.key


def test_fifty_move_rule():
    pos = parse_fen("4k3/8/8/8/8/8/8/R3K3 w - - 99 80")
    assert not terminal_status(pos).is_terminal
    pos = apply_move(pos, "a1a2")
    assert terminal_status(pos).reason is DrawReason.FIFTY_MOVE
    assert chess.Board(to_fen(pos)).is_fifty_moves()


def test_checkmate_beats_fifty_move_rule():
    pos = parse_fen("7k/8/6K1/8/8/8/8/R7 w - - 99 80")
    assert terminal_status(apply_move(pos, "a1a8")).winner is Color.WHITE


def test_san_round_trip_and_disambiguation():
    pos = parse_fen("4k3/8/8/8/8/8/8/R3K2R w KQ - 0 1")
    assert san(pos, Move.from_uci("e1g1")) == "O-O"
    both = "4k3/8/8/8/8/8/4K3/R6R w - - 0 1"
    assert san(parse_fen(both), Move.from_uci("a1d1")) == "Rad1"
    assert chess.Board(both).san(chess.Move.from_uci("a1d1")) == "Rad1"
    for m in legal_moves(parse_fen(KIWIPETE)):
        p = parse_fen(KIWIPETE)
        assert parse_san(p, san(p, m)) == m


def test_promotion_text():
    pos = parse_fen("4k3/P7/8/8/8/8/8/4K3 w - - 0 1")
    assert "a7a8q" in {m.uci for m in legal_moves(pos)}
    assert san(pos, Move.from_uci("a7a8q")) == "a8=Q+"


def test_trajectory_position_command():
    t = Trajectory.from_fen("startpos", ["e2e4", "e7e5"])
    assert t.position_command() == "position startpos moves e2e4 e7e5"
    t = Trajectory.from_fen("4k3/8/8/8/8/8/8/4K2R w K - 0 1")
    assert t.position_command() == "position fen 4k3/8/8/8/8/8/8/4K2R w K - 0 1"
    assert len(t.extend(Move.from_uci("h1h2"))) == 1


def test_trajectory_keeps_repetition_history():
    shuffle = ["g1f3", "g8f6", "f3g1", "f6g8"] * 2
    t = Trajectory.from_fen("startpos", shuffle)
    assert CHESS.terminal_status(t.final).reason is DrawReason.THREEFOLD_REPETITION


# tic-tac-toe


def test_tictactoe_rules():
    g = TICTACTOE
    s = g.initial_state()
    assert g.legal_moves(s) == list(range(9))
    for m in (0, 3, 1, 4, 2):
        s = g.apply_move(s, m)
    assert g.terminal_status(s).winner is Color.WHITE
    assert g.legal_moves(s) == []
    full = TTTState.from_string("XOXXOOOXX")
    assert g.terminal_status(full).reason is DrawReason.STALEMATE
    with pytest.raises(IllegalMove):
        g.apply_move(g.initial_state().swapped().swapped(), 9)


def test_tictactoe_state_text():
    s = TTTState.from_string("X...O....")
    assert str(s) == "X...O.... x"
    assert str(s.swapped()) == "O...X.... o"
