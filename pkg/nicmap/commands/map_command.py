import json
from pathlib import Path
from typing import Optional

import click

from nicmap.commands.common import (
    build_run_config,
    cluster_option,
    default_out_dir,
    load_cluster,
    load_workload,
    mapping_options,
    strategies_option,
    threshold_option,
    workload_option,
)
from nicmap.core.exceptions import ReportError
from nicmap.core.logging_config import log_report
from nicmap.core.tracing import track_run
from nicmap.services.mapping_service import MappingService


@click.command("map")
@workload_option
@cluster_option
@strategies_option
@click.option(
    "-o", "--out", type=click.Path(file_okay=False, path_type=Path), default=None, metavar="PATH",
    help="Directory for the placement files (default: OUTPUT_DIR).",
)
@threshold_option
def map_command(workload: str, cluster: Optional[str], strategies: str, out: Optional[Path], threshold_nodes: str):
    """Map a workload with each strategy and write one placement JSON per strategy."""
    config = build_run_config(
        workload_path=workload, cluster_path=cluster, strategies=strategies, out=out,
        threshold_nodes=threshold_nodes,
    )
    spec = load_cluster(config)
    label, jobs = load_workload(config.workload_path)
    target_dir = default_out_dir(config.out)
    try:
        target_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ReportError(str(target_dir), e.strerror or str(e)) from e

    for strategy in config.strategies:
        with track_run("map", f"{label}/{strategy.value}"):
            placement = MappingService.map_workload(strategy, jobs, spec, options=mapping_options(config))
        target = target_dir / f"{label}_{strategy.value}_placement.json"
        records = [record.model_dump() for record in placement.to_records()]
        try:
            target.write_text(json.dumps(records, indent=2) + "\n", encoding="utf-8")
        except OSError as e:
            raise ReportError(str(target), e.strerror or str(e)) from e
        log_report(str(target), len(records), "placement")

        click.echo(f"# {label} / {strategy.value} -> {target}")
        click.echo(MappingService.render_placement_table(placement, spec))
