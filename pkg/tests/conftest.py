"""Shared test fixtures for the rmtsource tests."""

import pytest

from rmtsource.config import Settings
from rmtsource.core import RunnerCore
from rmtsource.tasks.utils import TaskContext


@pytest.fixture
def settings():
    """Settings with small Monte Carlo defaults so task-level tests stay fast."""
    return Settings(
        workers=1,
        seed=0,
        samples=4000,
        chunk_size=1024,
        z_threshold=4.0,
        log_level="WARNING",
    )


@pytest.fixture
def context(settings):
    """Task context with seed 0 and one worker."""
    return TaskContext(seed=0, workers=1, settings=settings)


@pytest.fixture
def core(settings):
    """Runner core backed by the test settings."""
    return RunnerCore(settings)
