# SPDX-License-Identifier: MIT
from __future__ import annotations

import logging
import os
import sys
from typing import Final
from typing import Literal

from lungvit.errors import ConfigError

LogLevel = Literal["error", "info", "debug"]

ENV_VAR: Final = "VIT_LOG_LEVEL"
DEFAULT_LEVEL: Final[LogLevel] = "info"
LEVELS: Final[dict[str, int]] = {
    "error": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

logger = logging.getLogger("lungvit")

_handler: logging.Handler | None = None


def _level_from_env() -> LogLevel:
    raw = os.environ.get(ENV_VAR, "").strip().lower()
    if not raw:
        return DEFAULT_LEVEL
    if raw not in LEVELS:
        raise ConfigError(f"{ENV_VAR} must be 'error', 'info', or 'debug', got {raw!r}")
    return raw  # type: ignore[return-value]


def configure(level: LogLevel | None = None) -> LogLevel:
    """
    Attach the ``[lungvit]`` stderr handler and set the package level.

    Without an explicit level, ``VIT_LOG_LEVEL`` is re-read, so calling this again
    after changing the environment restores the current environment's setting.
    """
    global _handler  # noqa: PLW0603

    if _handler is None:
        _handler = logging.StreamHandler()
        _handler.setFormatter(logging.Formatter("[lungvit] %(levelname)s %(message)s"))
        logger.addHandler(_handler)
        logger.propagate = False
    # Follow the current stderr (it is swapped out under test capture).
    _handler.setStream(sys.stderr)

    resolved = level if level is not None else _level_from_env()
    if resolved not in LEVELS:
        raise ConfigError(f"log level must be 'error', 'info', or 'debug', got {resolved!r}")

    logger.setLevel(LEVELS[resolved])
    return resolved


def get_level() -> LogLevel:
    for name, value in LEVELS.items():
        if logger.level == value:
            return name  # type: ignore[return-value]
    return DEFAULT_LEVEL
