"""
Rich logging configuration.

This module provides enhanced logging with rich formatting for terminal output.
"""

import logging

from rich.console import Console
from rich.logging import RichHandler


def setup_rich_logging(console: Console | None = None, level: str | int = logging.INFO) -> Console:
    """
    Set up rich logging for standard Python logging.

    Args:
        console: Rich console instance to use. If None, creates a new one on stderr.
        level: Level for the package loggers.

    Returns:
        The console instance used for logging.
    """
    if console is None:
        console = Console(stderr=True)

    rich_handler = RichHandler(
        console=console,
        show_time=True,
        show_path=False,
        show_level=True,
        markup=False,
        rich_tracebacks=True,
    )
    rich_handler.setFormatter(logging.Formatter(fmt="[%(name)s] %(message)s", datefmt="%Y-%m-%d %H:%M:%S"))

    root_logger = logging.getLogger()

    # Remove existing handlers to avoid duplicate output
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    root_logger.addHandler(rich_handler)
    root_logger.setLevel(logging.WARNING)
    logging.getLogger("rsocc").setLevel(level)

    return console
