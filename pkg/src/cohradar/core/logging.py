"""Logging configuration."""

import logging
import sys


def setup_logging(log_level: str = "INFO", quiet: bool = False) -> None:
    """Configure logging.

    ``quiet`` raises the threshold to WARNING regardless of ``log_level``.
    """
    level = getattr(logging, log_level.upper(), logging.INFO)
    if quiet:
        level = max(level, logging.WARNING)
    logging.basicConfig(
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stdout,
        level=level,
        force=True,
    )


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance."""
    return logging.getLogger(name)
