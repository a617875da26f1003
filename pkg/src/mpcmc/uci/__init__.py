from .client import (
    BUILTIN_STUB,
    Budget,
    EngineConfig,
    EngineCrashed,
    EngineError,
    EngineHandle,
    HandshakeTimeout,
    IllegalBestMove,
    ProtocolViolation,
    SearchResult,
    SpawnFailed,
    Timeout,
    UnsupportedOption,
    evaluate_position,
    launch_engine,
    search,
    shutdown,
    stub_config,
)
from .pool import EnginePool
from .score import MATE_BASE, Score, ScoreKind, normalize_score, terminal_score

__all__ = [
    "BUILTIN_STUB", "Budget", "EngineConfig", "EngineCrashed", "EngineError", "EngineHandle",
    "HandshakeTimeout", "IllegalBestMove", "ProtocolViolation", "SearchResult", "SpawnFailed",
    "Timeout", "UnsupportedOption", "evaluate_position", "launch_engine", "search", "shutdown",
    "stub_config", "EnginePool", "MATE_BASE", "Score", "ScoreKind", "normalize_score",
    "terminal_score",
]
