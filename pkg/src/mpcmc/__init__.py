"""Meta chess engine: exact first-step lookahead on top of UCI engines."""

__version__ = "0.1.0"
