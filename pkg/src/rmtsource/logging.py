"""Logging for rmtsource.

Everything goes to stderr under the ``rmtsource`` logger tree. stdout and
artifact files carry results only, so two identical runs stay
byte-identical whatever the log level.
"""

import logging
import sys
import time
from collections.abc import Iterator
from contextlib import contextmanager

PACKAGE_LOGGER = "rmtsource"
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def setup_logging(level: str = "INFO") -> logging.Logger:
    """Attach the stderr handler to the package logger and set its level.

    Repeated calls reuse the handler but rebind it to the current
    ``sys.stderr``, which may have been swapped since the last call.
    """
    logger = logging.getLogger(PACKAGE_LOGGER)
    numeric_level = getattr(logging, level.upper(), logging.INFO)
    logger.setLevel(numeric_level)

    stream_handlers = [h for h in logger.handlers if isinstance(h, logging.StreamHandler)]
    if not stream_handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=DATE_FORMAT))
        logger.addHandler(handler)
        stream_handlers = [handler]
    for handler in stream_handlers:
        handler.setStream(sys.stderr)
        handler.setLevel(numeric_level)
    return logger


def get_logger(module: str) -> logging.Logger:
    """Return the child logger for one numerical module (e.g. ``jack``)."""
    return logging.getLogger(f"{PACKAGE_LOGGER}.{module}")


@contextmanager
def shard_timer(logger: logging.Logger, label: str, size: int) -> Iterator[None]:
    """Log the start, duration and sample rate of one Monte Carlo shard at DEBUG."""
    logger.debug(f"{label}: {size} samples started")
    started = time.perf_counter()
    yield
    elapsed = time.perf_counter() - started
    rate = size / elapsed if elapsed > 0 else float("inf")
    logger.debug(f"{label}: {size} samples in {elapsed:.3f} s ({rate:.0f}/s)")
