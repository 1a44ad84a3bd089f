"""Tests for the logging helpers."""

import io
import logging

import numpy as np
import pytest

from rmtsource.logging import PACKAGE_LOGGER, get_logger, setup_logging, shard_timer
from rmtsource.montecarlo import LinearFactorProduct, estimate


@pytest.fixture
def package_logger():
    logger = logging.getLogger(PACKAGE_LOGGER)
    saved_handlers, saved_level = list(logger.handlers), logger.level
    logger.handlers.clear()
    yield logger
    logger.handlers[:] = saved_handlers
    logger.setLevel(saved_level)


class TestSetupLogging:
    def test_single_handler_on_repeat(self, package_logger):
        setup_logging("INFO")
        setup_logging("DEBUG")
        assert len(package_logger.handlers) == 1
        assert package_logger.level == logging.DEBUG
        assert package_logger.handlers[0].level == logging.DEBUG

    def test_unknown_level_falls_back_to_info(self, package_logger):
        setup_logging("chatty")
        assert package_logger.level == logging.INFO

    def test_rebinds_to_current_stderr(self, package_logger, monkeypatch):
        setup_logging("WARNING")
        replacement = io.StringIO()
        monkeypatch.setattr("sys.stderr", replacement)
        setup_logging("WARNING")
        get_logger("jack").warning("series truncated")
        assert "[WARNING] rmtsource.jack: series truncated" in replacement.getvalue()

    def test_child_logger_name(self):
        assert get_logger("duality").name == "rmtsource.duality"


class TestShardTimer:
    def test_logs_start_and_rate(self, caplog):
        logger = get_logger("montecarlo")
        with caplog.at_level(logging.DEBUG, logger=PACKAGE_LOGGER):
            with shard_timer(logger, "stream 0 worker 1", 500):
                pass
        messages = [record.getMessage() for record in caplog.records]
        assert messages[0] == "stream 0 worker 1: 500 samples started"
        assert messages[1].startswith("stream 0 worker 1: 500 samples in ")
        assert messages[1].endswith("/s)")

    def test_every_shard_is_timed(self, caplog):
        draw = lambda rng, size: np.zeros((size, 1))  # noqa: E731
        with caplog.at_level(logging.DEBUG, logger=PACKAGE_LOGGER):
            estimate(draw, LinearFactorProduct(points=[1.0]), 10, seed=0, workers=2)
        finished = [r.getMessage() for r in caplog.records if " samples in " in r.getMessage()]
        assert sorted(m.split(":")[0] for m in finished) == ["stream 0 worker 0", "stream 0 worker 1"]
