from pathlib import Path
from typing import List, Optional

import click

from nicmap.commands.common import (
    build_run_config,
    cluster_option,
    format_option,
    load_cluster,
    load_workload,
    mapping_options,
    sim_options,
    simulation_options,
    strategies_option,
    threshold_option,
    workload_option,
)
from nicmap.schemas.metrics_schema import MetricsReport
from nicmap.schemas.run_schema import OutputFormat, RunConfig, Strategy
from nicmap.services.experiment_service import Experiment, ExperimentService
from nicmap.services.metrics_service import MetricsService

out_option = click.option(
    "-o", "--out", type=click.Path(dir_okay=False, path_type=Path), default=None, metavar="PATH",
    help="Report file (default: standard output).",
)


def publish(reports: List[MetricsReport], config: RunConfig) -> None:
    """Write the report, with improvements of `new` when there is something to compare it to."""
    improvements = []
    if Strategy.NEW in config.strategies and len(config.strategies) > 1:
        improvements = MetricsService.improvement_table(reports, candidate=Strategy.NEW.value)

    document = MetricsService.emit(reports, config.output_format, config.out, improvements)
    if config.out is None:
        click.echo(document, nl=False)
    if improvements and (config.out is not None or config.output_format is OutputFormat.CSV):
        click.echo(MetricsService.render_improvements(improvements), err=True)


@click.command("compare")
@workload_option
@cluster_option
@strategies_option
@out_option
@format_option
@simulation_options
@threshold_option
def compare_command(
    workload: str,
    cluster: Optional[str],
    strategies: str,
    out: Optional[Path],
    output_format: str,
    seed: Optional[int],
    arrivals: str,
    nic_duplex: str,
    waiting_servers: str,
    trace: Optional[Path],
    threshold_nodes: str,
):
    """Map, simulate and compare strategies on one workload."""
    config = build_run_config(
        workload_path=workload, cluster_path=cluster, strategies=strategies, out=out,
        output_format=output_format, seed=seed, arrivals=arrivals, nic_duplex=nic_duplex,
        waiting_servers=waiting_servers, trace=trace, threshold_nodes=threshold_nodes,
    )
    spec = load_cluster(config)
    label, jobs = load_workload(config.workload_path)
    experiment = Experiment(
        workload=label, jobs=jobs, spec=spec,
        mapping=mapping_options(config), simulation=sim_options(config),
        scope=config.waiting_servers, trace=config.trace,
    )
    publish(ExperimentService.compare(experiment, config.strategies), config)


@click.command("reproduce")
@cluster_option
@strategies_option
@out_option
@format_option
@simulation_options
@threshold_option
def reproduce_command(
    cluster: Optional[str],
    strategies: str,
    out: Optional[Path],
    output_format: str,
    seed: Optional[int],
    arrivals: str,
    nic_duplex: str,
    waiting_servers: str,
    trace: Optional[Path],
    threshold_nodes: str,
):
    """Compare strategies on every bundled synthetic workload in one report."""
    if trace is not None:
        raise click.UsageError("--trace is not available for reproduce; use compare on one workload")
    config = build_run_config(
        cluster_path=cluster, strategies=strategies, out=out, output_format=output_format,
        seed=seed, arrivals=arrivals, nic_duplex=nic_duplex, waiting_servers=waiting_servers,
        threshold_nodes=threshold_nodes,
    )
    reports = ExperimentService.reproduce(
        load_cluster(config),
        config.strategies,
        mapping=mapping_options(config),
        simulation=sim_options(config),
        scope=config.waiting_servers,
    )
    publish(reports, config)
