from pathlib import Path
from typing import Optional

import click

from nicmap.commands.common import (
    build_run_config,
    cluster_option,
    format_option,
    load_cluster,
    load_placement,
    load_workload,
    sim_options,
    simulation_options,
    workload_option,
)
from nicmap.core.tracing import track_run
from nicmap.services.experiment_service import Experiment, simulate_placement
from nicmap.services.metrics_service import MetricsService


@click.command("simulate")
@workload_option
@cluster_option
@click.option(
    "-p", "--placement", "placement_path", required=True,
    type=click.Path(dir_okay=False, path_type=Path), metavar="PATH",
    help="Placement JSON, e.g. one written by `map`.",
)
@click.option(
    "-o", "--out", type=click.Path(dir_okay=False, path_type=Path), default=None, metavar="PATH",
    help="Report file (default: standard output).",
)
@format_option
@simulation_options
def simulate_command(
    workload: str,
    cluster: Optional[str],
    placement_path: Path,
    out: Optional[Path],
    output_format: str,
    seed: Optional[int],
    arrivals: str,
    nic_duplex: str,
    waiting_servers: str,
    trace: Optional[Path],
):
    """Simulate an existing placement and report its metrics."""
    config = build_run_config(
        workload_path=workload, cluster_path=cluster, strategies="new", out=out,
        output_format=output_format, seed=seed, arrivals=arrivals, nic_duplex=nic_duplex,
        waiting_servers=waiting_servers, trace=trace,
    )
    spec = load_cluster(config)
    label, jobs = load_workload(config.workload_path)
    placement = load_placement(placement_path)

    experiment = Experiment(
        workload=label, jobs=jobs, spec=spec,
        simulation=sim_options(config), scope=config.waiting_servers, trace=config.trace,
    )
    with track_run("simulate", f"{label}/{placement_path.stem}"):
        report = simulate_placement(experiment, placement, placement_path.stem, config.trace)

    document = MetricsService.emit([report], config.output_format, config.out)
    if config.out is None:
        click.echo(document, nl=False)
