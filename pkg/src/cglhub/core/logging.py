# -*- coding: utf-8 -*-
import logging
import os
import sys

from colorama import Fore, Style

_LEVEL_COLORS = {
    logging.DEBUG: Fore.CYAN,
    logging.INFO: Fore.GREEN,
    logging.WARNING: Fore.YELLOW,
    logging.ERROR: Fore.RED,
    logging.CRITICAL: Fore.RED + Style.BRIGHT,
}

_HANDLER_FLAG = "_cglhub_handler"


class _ColorFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        color = _LEVEL_COLORS.get(record.levelno, "")
        record.levelname_colored = f"{color}{record.levelname:<7}{Style.RESET_ALL}"
        return super().format(record)


def _resolve_level(level) -> int:
    if level is None:
        level = os.environ.get("CGL_LOG", "WARNING")
    if isinstance(level, int):
        return level
    level = str(level).strip()
    if level.isdigit():
        return int(level)
    resolved = logging.getLevelName(level.upper())
    return resolved if isinstance(resolved, int) else logging.WARNING


def setup_logging(level=None) -> logging.Logger:
    """Attach a coloured stderr handler to the ``cglhub`` logger.

    ``level`` may be a name or number; when omitted the ``CGL_LOG``
    environment variable is used, falling back to WARNING. Calling this
    twice replaces the level but never stacks handlers.
    """
    logger = logging.getLogger("cglhub")
    logger.setLevel(_resolve_level(level))
    if not any(getattr(h, _HANDLER_FLAG, False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(_ColorFormatter("%(levelname_colored)s %(name)s: %(message)s"))
        setattr(handler, _HANDLER_FLAG, True)
        logger.addHandler(handler)
    return logger


def progress_enabled() -> bool:
    """True when INFO messages from cglhub would be shown (drives tqdm bars)."""
    return logging.getLogger("cglhub").isEnabledFor(logging.INFO)
