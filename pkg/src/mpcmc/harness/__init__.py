"""Match running: players, openings, games, scoring and PGN."""
from .config import (
    ConfigError,
    MatchConfig,
    Opening,
    PlayerSpec,
    load_config,
    lookahead_from_dict,
    lookahead_to_dict,
    materialize,
    save_config,
)
from .match import DuplicateExhaustion, MatchResult, MatchScore, generate_openings, run_match, schedule
from .pgn import export_pgn, game_pgn, read_pgn, replay_pgn
from .play import GameRecord, Prediction, play_game, result_text

__all__ = [
    "ConfigError", "MatchConfig", "Opening", "PlayerSpec", "load_config", "lookahead_from_dict",
    "lookahead_to_dict", "materialize", "save_config", "DuplicateExhaustion", "MatchResult",
    "MatchScore", "generate_openings", "run_match", "schedule", "export_pgn", "game_pgn",
    "read_pgn", "replay_pgn", "GameRecord", "Prediction", "play_game", "result_text",
]
