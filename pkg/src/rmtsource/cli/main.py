"""Main CLI entry point for rmtsource."""

import click

from rmtsource import __version__
from rmtsource.cli.commands import (
    charpoly_cmd,
    duality_cmd,
    sample_cmd,
    selftest_cmd,
    softedge_cmd,
    specfun_cmd,
)


@click.group()
@click.version_option(version=__version__, prog_name="rmtsource")
def cli() -> None:
    """rmtsource - averaged characteristic polynomials of Gaussian and chiral ensembles with a source.

    Every command writes one JSON (or CSV) artifact to stdout or --output.
    Errors go to stderr as JSON; exit codes are 0 (ok), 2 (invalid input)
    and 3 (failed or impossible check).

    Configuration via environment variables (prefix RMTSOURCE_):
      - RMTSOURCE_WORKERS: Default Monte Carlo workers (default: 1)
      - RMTSOURCE_SEED: Default master seed (default: 0)
      - RMTSOURCE_SAMPLES: Default samples per duality side (default: 100000)
      - RMTSOURCE_CHUNK_SIZE: Samples per vectorised batch (default: 4096)
      - RMTSOURCE_Z_THRESHOLD: Duality pass threshold (default: 4)
      - RMTSOURCE_JACK_DEGREE: Jack series truncation degree (default: 20)
      - RMTSOURCE_LOG_LEVEL: Logging level on stderr (default: INFO)
    """
    pass


# Register commands
cli.add_command(specfun_cmd)
cli.add_command(sample_cmd)
cli.add_command(charpoly_cmd)
cli.add_command(duality_cmd)
cli.add_command(softedge_cmd)
cli.add_command(selftest_cmd)


def main() -> None:
    """Main entry point for the rmtsource command."""
    cli()


if __name__ == "__main__":
    main()
