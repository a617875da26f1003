import io

import pytest

from conftest import random_positions
from mpcmc.game import apply_move, legal_moves, parse_fen
from mpcmc.stub import StubParams, uci_loop
from mpcmc.stub.__main__ import params_from_args
from mpcmc.stub.search import material_eval, negamax_value, search_fixed_depth
from mpcmc.uci.score import MATE_BASE


def brute_force(pos, depth):
    """First move (canonical order) reaching the unpruned negamax optimum."""
    best_move, best = None, None
    for m in legal_moves(pos):
        v = -negamax_value(apply_move(pos, m), depth - 1, ply=1)
        if best is None or v > best:
            best_move, best = m, v
    return best_move, best


@pytest.mark.parametrize("depth", [1, 2])
def test_alpha_beta_equals_unpruned_negamax(depth):
    for pos in random_positions(12 if depth == 1 else 6, seed=depth):
        r = search_fixed_depth(pos, depth)
        assert (r.move, r.score) == brute_force(pos, depth)


def test_material_eval_is_antisymmetric():
    pos = parse_fen("4k3/8/8/8/8/8/8/R3K3 w - - 0 1")
    flipped = parse_fen("4k3/8/8/8/8/8/8/R3K3 b - - 0 1")
    assert material_eval(pos) == 500 == -material_eval(flipped)


def test_mate_in_one_is_announced():
    r = search_fixed_depth(parse_fen("6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1"), 1)
    assert r.move.uci == "a1a8" and r.score == MATE_BASE - 1 and r.uci_score == "mate 1"


def test_getting_mated_is_announced_negative():
    # black's only move is Kb8, answered by Rh8 mate
    r = search_fixed_depth(parse_fen("k7/8/1K6/8/8/8/8/7R b - - 0 1"), 2)
    assert r.score == -(MATE_BASE - 2) and r.uci_score == "mate -1"


def run(script, **kw):
    out = io.StringIO()
    uci_loop(io.StringIO(script), out, StubParams(**kw))
    return out.getvalue()


def test_handshake_lines():
    assert run("uci\nisready\nquit\n") == (
        "id name mpcmc-stub\nid author mpcmc\n"
        "option name Hash type spin default 1 min 1 max 1024\n"
        "option name Threads type spin default 1 min 1 max 1\n"
        "uciok\nreadyok\n")


def test_go_depth_overrides_default():
    text = run("position startpos\ngo depth 1\n", depth=3)
    assert text.splitlines()[0].startswith("info depth 1 score cp 0 nodes 20 ")


def test_unknown_commands_are_ignored():
    assert run("debug on\nregister later\nisready\n") == "readyok\n"


def test_bad_position_reports_error():
    assert run("position startpos moves e2e5\n").startswith("info string error")


def test_fault_modes():
    assert run("position startpos\ngo depth 1\n", fault="garbage").endswith("bestmove zz99\n")
    assert "info" not in run("position startpos\ngo depth 1\n", fault="noscore")
    assert run("position startpos\ngo depth 1\nisready\n", fault="crash") == ""
    illegal = run("position startpos\ngo depth 1\n", fault="illegal").split()[-1]
    assert illegal not in {m.uci for m in legal_moves(parse_fen("startpos"))}


def test_params_validation():
    with pytest.raises(ValueError):
        StubParams(depth=0)
    assert params_from_args(["--depth", "3", "--fault", "noscore"]).fault == "noscore"
