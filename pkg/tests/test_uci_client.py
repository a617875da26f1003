import sys
import threading

import pytest

from mpcmc.game import Color, Trajectory, apply_moves, start_position
from mpcmc.uci import (
    Budget,
    EngineConfig,
    EngineCrashed,
    EnginePool,
    IllegalBestMove,
    ProtocolViolation,
    Score,
    SpawnFailed,
    UnsupportedOption,
    evaluate_position,
    launch_engine,
    normalize_score,
    search,
    stub_config,
    terminal_score,
)
from mpcmc.uci.score import MATE_BASE, ScoreKind, mate_plies, root_relative

MATE1 = "6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1"


# scores


def test_normalize_examples():
    assert normalize_score(Score.cp(35, Color.WHITE), Color.WHITE) == 35
    assert normalize_score(Score.cp(35, Color.WHITE), Color.BLACK) == -35
    assert normalize_score(Score.mate(3, Color.WHITE), Color.BLACK) == -999_997
    assert normalize_score(Score.mate(1, Color.WHITE), Color.WHITE) == 999_999
    assert normalize_score(Score.mate(5, Color.WHITE), Color.WHITE) == 999_995


def test_mates_dominate_centipawns():
    for cp in (-10**5, 0, 10**5):
        assert normalize_score(Score.mate(50, Color.BLACK), Color.BLACK) > normalize_score(
            Score.cp(cp, Color.BLACK), Color.BLACK)


def test_uci_scores_are_side_to_move_relative():
    assert Score.from_uci("cp", -20, Color.BLACK) == Score.cp(-20, Color.BLACK)
    assert Score.from_uci("mate", 2, Color.BLACK) == Score.mate(2, Color.BLACK)
    assert Score.from_uci("mate", -2, Color.BLACK) == Score.mate(2, Color.WHITE)
    with pytest.raises(ValueError):
        Score.from_uci("wdl", 1, Color.WHITE)


def test_mate_plies_and_root_relative():
    # mate 2 for the side to move lands on its 3rd ply; against it, on the 4th
    assert mate_plies(Score.mate(2, Color.WHITE), Color.WHITE) == 3
    assert mate_plies(Score.mate(2, Color.BLACK), Color.WHITE) == 4
    assert root_relative(Score.mate(1, Color.WHITE), Color.WHITE, 2, Color.WHITE) == MATE_BASE - 3


def test_terminal_scores():
    mated = apply_moves(start_position(), ["f2f3", "e7e5", "g2g4", "d8h4"])
    from mpcmc.game import terminal_status

    s = terminal_score(terminal_status(mated), Color.WHITE)
    assert s == Score(ScoreKind.MATE, 0, Color.BLACK)
    assert normalize_score(s, Color.WHITE) == -MATE_BASE


# client


def test_stub_handshake_and_options():
    h = launch_engine(stub_config(1))
    try:
        assert h.engine_name == "mpcmc-stub"
        assert "> setoption name Hash value 1" in h.transcript
        assert "> setoption name Threads value 1" in h.transcript
    finally:
        h.shutdown()


def test_search_is_deterministic_and_legal():
    traj = Trajectory.from_fen("startpos", ["d2d4"])
    with EnginePool.launch(stub_config(2), 2) as pool:
        results = []
        for _ in range(3):
            with pool.acquire() as h:
                results.append(h.search(traj))
    assert results[0] == results[1] == results[2]


def test_mate_in_one_score():
    h = launch_engine(stub_config(1))
    try:
        r = search(h, Trajectory.from_fen(MATE1))
        assert r.best_move.uci == "a1a8"
        assert r.score == Score.mate(1, Color.WHITE)
    finally:
        h.shutdown()


def test_evaluate_terminal_short_circuits():
    h = launch_engine(stub_config(1))
    try:
        before = len(h.transcript)
        mated = Trajectory.from_fen("startpos", ["f2f3", "e7e5", "g2g4", "d8h4"])
        assert evaluate_position(h, mated) == Score.mate(0, Color.BLACK)
        stale = Trajectory.from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1")
        assert evaluate_position(h, stale) == Score.cp(0, Color.BLACK)
        assert len(h.transcript) == before
        ongoing = Trajectory.from_fen(MATE1)
        assert evaluate_position(h, ongoing) == search(h, ongoing).score
    finally:
        h.shutdown()


@pytest.mark.parametrize("fault,error", [
    ("illegal", IllegalBestMove), ("garbage", ProtocolViolation),
    ("noscore", ProtocolViolation), ("crash", EngineCrashed),
])
@pytest.mark.parametrize("in_process", [True, False])
def test_faulty_engines(fault, error, in_process):
    h = launch_engine(stub_config(1, fault=fault, in_process=in_process))
    try:
        with pytest.raises(error):
            h.search(Trajectory.from_fen("startpos"))
    finally:
        h.shutdown()
        h.shutdown()
    assert h.closed


def test_nonexistent_path():
    with pytest.raises(SpawnFailed):
        launch_engine(EngineConfig("/nonexistent/engine"))


def test_unsupported_option():
    cfg = EngineConfig("builtin:stub", ("--depth", "1"), options={"SyzygyPath": "/tmp"},
                       budget_kind="depth", budget=1)
    with pytest.raises(UnsupportedOption):
        launch_engine(cfg)


def test_double_shutdown_and_exit_code():
    h = launch_engine(stub_config(1, in_process=False))
    h.shutdown()
    h.shutdown()
    assert h.exit_code == 0 and h.transcript[-1] == "> quit"


def test_reset_policies_on_the_wire():
    traj = Trajectory.from_fen("startpos")
    persistent = launch_engine(stub_config(1, reset_policy="persistent"))
    restart = launch_engine(stub_config(1, reset_policy="restart_per_query"))
    try:
        persistent.search(traj)
        persistent.search(traj)
        assert "> ucinewgame" not in persistent.transcript
        restart.search(traj)
        restart.search(traj)
        assert restart.transcript.count("> uci") == 2
        assert "> ucinewgame" not in restart.transcript
    finally:
        persistent.shutdown()
        restart.shutdown()


def test_budget_and_config_validation():
    assert Budget("movetime", 250).go_command() == "go movetime 250"
    assert Budget("nodes", 5000).go_command() == "go nodes 5000"
    with pytest.raises(ValueError):
        Budget("depth", 0)
    with pytest.raises(ValueError):
        EngineConfig("x", options={" ": "1"})
    with pytest.raises(ValueError):
        EngineConfig("x", reset_policy="sometimes")
    cfg = EngineConfig("stockfish", args="--foo bar")
    assert EngineConfig.from_dict(cfg.to_dict()) == cfg


def test_pool_hands_out_each_member_once_at_a_time():
    with EnginePool.launch(stub_config(1), 3) as pool:
        seen, lock, active = [], threading.Lock(), []

        def work():
            with pool.acquire() as h:
                with lock:
                    assert h not in active
                    active.append(h)
                    seen.append(h)
                h.search(Trajectory.from_fen("startpos"))
                with lock:
                    active.remove(h)

        threads = [threading.Thread(target=work) for _ in range(12)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
    assert len(seen) == 12 and len(set(map(id, seen))) <= 3
