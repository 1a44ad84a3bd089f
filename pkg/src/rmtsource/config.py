"""Configuration management for rmtsource."""

from pydantic import Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Run configuration loaded from environment variables.

    Environment variables are prefixed with RMTSOURCE_.
    Example: RMTSOURCE_WORKERS=4 sets the default Monte Carlo worker count.
    """

    model_config = {"env_prefix": "RMTSOURCE_"}

    # Monte Carlo
    workers: int = Field(
        default=1,
        ge=1,
        description="Default number of Monte Carlo workers (one RNG stream each)",
    )
    seed: int = Field(
        default=0,
        ge=0,
        description="Default master seed for all random output",
    )
    samples: int = Field(
        default=100_000,
        ge=2,
        description="Default Monte Carlo sample count per side",
    )
    chunk_size: int = Field(
        default=4096,
        ge=1,
        description="Samples drawn per vectorised batch inside a worker",
    )
    z_threshold: float = Field(
        default=4.0,
        gt=0.0,
        description="Pass threshold on the duality z-score",
    )

    # Jack series
    jack_degree: int = Field(
        default=20,
        ge=0,
        description="Default truncation degree K of the Jack hypergeometric series",
    )
    jack_max_degree: int = Field(
        default=40,
        ge=0,
        description="Hard limit on partition weights handled by the Jack engine",
    )
    jack_tolerance: float = Field(
        default=1e-10,
        gt=0.0,
        description="Tail estimate above which a truncation warning is logged",
    )

    # Quadrature and recurrences
    hermite_table_limit: int = Field(
        default=2000,
        ge=1,
        description="Largest Hermite degree the incomplete Hermite expansion may use",
    )
    hermite_extra_nodes: int = Field(
        default=8,
        ge=0,
        description="Gauss-Hermite nodes beyond N for the Gaussian average",
    )
    laguerre_extra_nodes: int = Field(
        default=40,
        ge=0,
        description="Gauss-Laguerre nodes beyond p for the chiral averages",
    )

    log_level: str = Field(
        default="INFO",
        description="Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)",
    )


def get_settings() -> Settings:
    """Create and return a Settings instance from environment variables."""
    return Settings()
