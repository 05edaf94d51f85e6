from typing import Optional

import click

from nicmap.commands.compare_command import compare_command, reproduce_command
from nicmap.commands.map_command import map_command
from nicmap.commands.simulate_command import simulate_command
from nicmap.commands.validate_command import validate_command
from nicmap.core.config import settings
from nicmap.core.exceptions import NicmapError
from nicmap.core.logging_config import log_error, setup_logging

# Setup logging first
setup_logging()


class NicmapGroup(click.Group):
    """Renders domain errors as one-line diagnostics with a nonzero exit."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except NicmapError as e:
            log_error(e, ctx.invoked_subcommand)
            raise click.ClickException(str(e)) from e


@click.group(cls=NicmapGroup, context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(settings.VERSION, prog_name=settings.APP_NAME)
@click.option("--log-level", default=None, metavar="LEVEL", help="Override LOG_LEVEL for this run.")
def cli(log_level: Optional[str]):
    """Contention-aware process mapping and channel queueing simulation."""
    if log_level:
        setup_logging(log_level)


cli.add_command(map_command)
cli.add_command(simulate_command)
cli.add_command(compare_command)
cli.add_command(validate_command)
cli.add_command(reproduce_command)


def main():
    cli(prog_name=settings.APP_NAME)
