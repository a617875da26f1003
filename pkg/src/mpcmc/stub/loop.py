"""Line-oriented UCI front end for the stub engine."""
from __future__ import annotations

import logging
from typing import IO

from ..game import chess as ch
from ..game.types import GameError
from .search import StubParams, search_fixed_depth

log = logging.getLogger(__name__)


def _parse_position(tokens: list[str]) -> ch.Position:
    if not tokens:
        raise ValueError("empty position command")
    if tokens[0] == "startpos":
        pos, rest = ch.start_position(), tokens[1:]
    elif tokens[0] == "fen":
        if "moves" in tokens:
            i = tokens.index("moves")
            fen, rest = " ".join(tokens[1:i]), tokens[i:]
        else:
            fen, rest = " ".join(tokens[1:]), []
        pos = ch.parse_fen(fen)
    else:
        raise ValueError(f"expected startpos or fen, got {tokens[0]!r}")
    if rest:
        if rest[0] != "moves":
            raise ValueError(f"unexpected token {rest[0]!r}")
        for text in rest[1:]:
            pos = ch.apply_move(pos, text)
    return pos


def _illegal_move(pos: ch.Position) -> str:
    legal = {m.uci for m in ch.legal_moves(pos)}
    for a in range(64):
        for b in range(64):
            text = ch.square_name(a) + ch.square_name(b)
            if a != b and text not in legal:
                return text
    raise AssertionError("unreachable")


def uci_loop(inp: IO[str], out: IO[str], params: StubParams | None = None) -> None:
    params = params or StubParams()
    pos = ch.start_position()

    def emit(line: str) -> None:
        out.write(line + "\n")
        out.flush()

    for raw in inp:
        line = raw.strip()
        if not line:
            continue
        cmd, *args = line.split()
        if cmd == "uci":
            emit(f"id name {params.name}")
            emit("id author mpcmc")
            emit("option name Hash type spin default 1 min 1 max 1024")
            emit("option name Threads type spin default 1 min 1 max 1")
            emit("uciok")
        elif cmd == "isready":
            emit("readyok")
        elif cmd == "ucinewgame":
            pos = ch.start_position()
        elif cmd == "position":
            try:
                pos = _parse_position(args)
            except (ValueError, GameError) as exc:
                emit(f"info string error {exc}")
        elif cmd == "go":
            depth = params.depth
            if "depth" in args:
                try:
                    depth = max(1, int(args[args.index("depth") + 1]))
                except (IndexError, ValueError):
                    emit("info string error bad depth")
            if params.fault == "crash":
                return
            if not ch.legal_moves(pos):
                emit("info depth 0 score cp 0")
                emit("bestmove 0000")
                continue
            result = search_fixed_depth(pos, depth, params.values)
            move = result.move.uci
            if params.fault == "illegal":
                move = _illegal_move(pos)
            elif params.fault == "garbage":
                move = "zz99"
            if params.fault != "noscore":
                emit(f"info depth {depth} score {result.uci_score} nodes {result.nodes} pv {result.move.uci}")
            emit(f"bestmove {move}")
        elif cmd == "quit":
            return
        # anything else is ignored, as UCI prescribes
