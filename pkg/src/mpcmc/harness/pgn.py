"""PGN export (Seven Tag Roster, SAN movetext) and a minimal movetext reader."""
from __future__ import annotations

import re
import textwrap
from typing import Iterable

from ..game.chess import START_FEN, Move, apply_move, parse_fen, parse_san, san, to_fen
from .play import GameRecord

_TERMINATION = {None: "normal", "ply_cap": "adjudication", "forfeit": "abandoned"}
_TAG = re.compile(r'\[(\w+)\s+"((?:[^"\\]|\\.)*)"\]')
_SKIP = re.compile(r"\d+\.(\.\.)?|1-0|0-1|1/2-1/2|\*|\$\d+")


def _escape(value: str) -> str:
    return value.replace("\\", "\\\\").replace('"', '\\"')


def movetext(fen: str, moves: Iterable[str], result: str) -> str:
    pos = parse_fen(fen)
    tokens = []
    for i, text in enumerate(moves):
        move = Move.from_uci(text)
        if pos.turn > 0:
            tokens.append(f"{pos.fullmove}.")
        elif i == 0:
            tokens.append(f"{pos.fullmove}...")
        tokens.append(san(pos, move))
        pos = apply_move(pos, move)
    tokens.append(result)
    return "\n".join(textwrap.wrap(" ".join(tokens), width=79, break_long_words=False,
                                   break_on_hyphens=False))


def game_pgn(record: GameRecord, event: str = "MPC-MC match", site: str = "?") -> str:
    tags = [
        ("Event", event),
        ("Site", site),
        # fixed so that repeated runs produce byte-identical files
        ("Date", "????.??.??"),
        ("Round", str(record.index + 1)),
        ("White", record.white),
        ("Black", record.black),
        ("Result", record.result),
    ]
    if record.opening.fen != START_FEN:
        tags += [("SetUp", "1"), ("FEN", record.opening.fen)]
    tags.append(("Termination", _TERMINATION[record.adjudication]))
    head = "\n".join(f'[{k} "{_escape(v)}"]' for k, v in tags)
    return f"{head}\n\n{movetext(record.opening.fen, record.moves, record.result)}\n"


def export_pgn(records: Iterable[GameRecord], path, event: str = "MPC-MC match") -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(game_pgn(r, event) for r in records))


def read_pgn(text: str) -> list[tuple[dict[str, str], list[str]]]:
    """Split PGN text into (tags, SAN moves) per game; comments are dropped, variations unsupported."""
    games = []
    tags: dict[str, str] = {}
    body: list[str] = []

    def flush():
        if tags or body:
            cleaned = re.sub(r"\{[^}]*\}", " ", " ".join(body))
            sans = [re.sub(r"^\d+\.(\.\.)?", "", tok) for tok in cleaned.split()
                    if not _SKIP.fullmatch(tok)]
            games.append((dict(tags), sans))

    for line in text.splitlines():
        line = line.strip()
        if line.startswith("["):
            if body:
                flush()
                tags.clear()
                body.clear()
            m = _TAG.match(line)
            if m:
                tags[m.group(1)] = m.group(2).replace('\\"', '"').replace("\\\\", "\\")
        elif line:
            body.append(line)
    flush()
    return games


def replay_pgn(tags: dict[str, str], sans: list[str]) -> str:
    """Final FEN after playing the SAN moves from the game's start position."""
    pos = parse_fen(tags.get("FEN", START_FEN))
    for text in sans:
        pos = apply_move(pos, parse_san(pos, text))
    return to_fen(pos)
