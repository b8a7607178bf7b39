"""Exception types shared across the package."""
from __future__ import annotations


class InvalidWindowError(ValueError):
    """Raised for degenerate search windows (radius or height cap < 1)."""


class BracketError(RuntimeError):
    """Raised when a bisection bracket does not straddle its target."""


class CensoredWalkError(RuntimeError):
    """A reversed-walk round exhausted its shell budget before finding a
    closed site; carries the partial trajectory built so far."""

    def __init__(self, message: str, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


class ConfigError(ValueError):
    """Invalid sweep configuration; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"config field '{field}': {message}")
        self.field = field
