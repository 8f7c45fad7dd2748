"""
Logging setup for the ``grangersets`` logger tree.

Library modules only call ``logging.getLogger(__name__)``; handlers are attached
here, once, by the CLI or by user code.
"""

import logging
import sys
from pathlib import Path
from typing import Optional, TextIO, Union

ROOT_LOGGER = "grangersets"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def _format(include_timestamp: bool, include_module: bool, include_process: bool) -> str:
    fields = ["%(asctime)s"] if include_timestamp else []
    fields.append("[%(levelname)s]")
    if include_process:
        fields.append("%(processName)s")
    if include_module:
        fields.append("%(name)s")
    fields.append("%(message)s")
    return " - ".join(fields)


def _handler(target: Union[TextIO, Path], level: int, formatter: logging.Formatter) -> logging.Handler:
    if isinstance(target, Path):
        target.parent.mkdir(parents=True, exist_ok=True)
        handler: logging.Handler = logging.FileHandler(target, encoding="utf-8")
    else:
        handler = logging.StreamHandler(target)
    handler.setLevel(level)
    handler.setFormatter(formatter)
    return handler


def setup_logging(
    level: str = "INFO",
    log_file: Optional[str] = None,
    format_string: Optional[str] = None,
    include_timestamp: bool = True,
    include_module: bool = True,
    include_process: bool = False,
) -> logging.Logger:
    """Send ``grangersets`` records to stderr and, optionally, to ``log_file``.

    Calling it again replaces the handlers of the previous call. Records do not
    propagate to the root logger.
    """
    log_level = getattr(logging, level.upper(), logging.INFO)
    formatter = logging.Formatter(
        format_string or _format(include_timestamp, include_module, include_process),
        datefmt=DATE_FORMAT,
    )

    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(log_level)
    logger.propagate = False
    for old in list(logger.handlers):
        logger.removeHandler(old)
        old.close()

    # stdout carries command output
    logger.addHandler(_handler(sys.stderr, log_level, formatter))
    if log_file:
        logger.addHandler(_handler(Path(log_file), log_level, formatter))
        logger.info("Logging to file: %s", log_file)

    logger.debug("Logging configured at %s level", level.upper())
    return logger


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


class LogContext:
    """Temporarily run a logger at another level.

    ``logger`` may be a logger or a logger name.
    """

    def __init__(self, logger: Union[logging.Logger, str], level: str):
        self.logger = logging.getLogger(logger) if isinstance(logger, str) else logger
        self.level = getattr(logging, level.upper())
        self.original_level: Optional[int] = None

    def __enter__(self) -> logging.Logger:
        self.original_level = self.logger.level
        self.logger.setLevel(self.level)
        return self.logger

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.logger.setLevel(self.original_level)
        return False
