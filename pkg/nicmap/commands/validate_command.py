from pathlib import Path
from typing import Optional

import click

from nicmap.commands.common import load_placement, load_workload
from nicmap.services.topology_service import TopologyService


@click.command("validate")
@click.option("-w", "--workload", "workload", default=None, metavar="PATH", help="Workload JSON to check.")
@click.option("-c", "--cluster", "cluster", default=None, metavar="PATH", help="Cluster JSON to check.")
@click.option(
    "-p", "--placement", "placement_path", default=None,
    type=click.Path(dir_okay=False, path_type=Path), metavar="PATH",
    help="Placement JSON to check; with -w it must cover every process.",
)
def validate_command(workload: Optional[str], cluster: Optional[str], placement_path: Optional[Path]):
    """Check documents against their schemas without running anything."""
    if workload is None and cluster is None and placement_path is None:
        raise click.UsageError("give at least one of -w, -c or -p")

    spec = TopologyService.load_cluster(cluster)
    if cluster is not None:
        click.echo(f"ok: {cluster} ({spec.num_nodes} nodes, {spec.total_cores} cores)")

    jobs = None
    if workload is not None:
        _, jobs = load_workload(workload)
        processes = sum(job.num_processes for job in jobs)
        click.echo(f"ok: {workload} ({len(jobs)} job(s), {processes} process(es))")

    if placement_path is not None:
        placement = load_placement(placement_path)
        placement.validate(jobs or [], spec)
        click.echo(f"ok: {placement_path} ({len(placement)} process(es) placed)")
