import sys

from loguru import logger

_LEVELS = ["WARNING", "INFO", "DEBUG"]


def configure_logging(verbose: int = 0) -> None:
    """Route loguru to a single stderr sink; -v gives INFO, -vv DEBUG."""
    level = _LEVELS[max(0, min(verbose, len(_LEVELS) - 1))]
    logger.remove()
    logger.add(
        sys.stderr,
        level=level,
        format="<green>{time:HH:mm:ss}</green> | <level>{level: <7}</level> | "
        "{name}:{function} - {message}",
    )
