"""Option declarations and loaders shared by the subcommands."""

from pathlib import Path
from typing import List, Optional, Tuple

import click
from pydantic import ValidationError

from nicmap.core.config import settings
from nicmap.core.exceptions import SchemaError
from nicmap.models.placement import Placement
from nicmap.schemas.cluster_schema import ClusterSpec
from nicmap.schemas.placement_schema import PlacementDocument
from nicmap.schemas.run_schema import (
    ArrivalMode,
    NicDuplex,
    OutputFormat,
    RunConfig,
    Strategy,
    ThresholdNodes,
    WaitingScope,
)
from nicmap.schemas.workload_schema import JobSpec
from nicmap.services.mapping_service import MappingOptions
from nicmap.services.simulation_service import SimulationOptions
from nicmap.services.topology_service import TopologyService
from nicmap.services.workload_service import WorkloadService

ALL_STRATEGIES = ",".join(s.value for s in Strategy)


def _choice(enum) -> click.Choice:
    return click.Choice([member.value for member in enum])


workload_option = click.option(
    "-w", "--workload", "workload", required=True, metavar="PATH",
    help="Workload JSON file, or the file name of a bundled workload (e.g. synt_workload_1.json).",
)
cluster_option = click.option(
    "-c", "--cluster", "cluster", default=lambda: settings.DEFAULT_CLUSTER_FILE, metavar="PATH",
    help="Cluster JSON file; defaults to the 16-node reference platform.",
)
strategies_option = click.option(
    "-s", "--strategies", "strategies", default=ALL_STRATEGIES, show_default=True, metavar="LIST",
    help="Comma-separated subset of blocked,cyclic,drb,new.",
)
format_option = click.option(
    "--format", "output_format", type=_choice(OutputFormat), default=OutputFormat.CSV.value,
    show_default=True, help="Report format.",
)
seed_option = click.option(
    "--seed", type=int, default=None, metavar="N", help="Random seed; required with --arrivals poisson.",
)
arrivals_option = click.option(
    "--arrivals", type=_choice(ArrivalMode), default=ArrivalMode.PERIODIC.value, show_default=True,
    help="Send release mode: fixed 1/rate spacing or seeded exponential gaps.",
)
duplex_option = click.option(
    "--nic-duplex", "nic_duplex", type=_choice(NicDuplex), default=NicDuplex.FULL.value, show_default=True,
    help="full: separate egress and ingress servers per NIC; half: one shared server.",
)
waiting_option = click.option(
    "--waiting-servers", "waiting_servers", type=_choice(WaitingScope), default=WaitingScope.ALL.value,
    show_default=True, help="Servers whose queueing counts toward total waiting.",
)
trace_option = click.option(
    "--trace", type=click.Path(dir_okay=False, path_type=Path), default=None, metavar="PATH",
    help="Write a per-message, per-hop CSV trace (one file per strategy).",
)
threshold_option = click.option(
    "--threshold-nodes", "threshold_nodes", type=_choice(ThresholdNodes), default=ThresholdNodes.ALL.value,
    show_default=True, help="Node count used by the threshold of the new strategy: all nodes or nodes with free cores.",
)


def simulation_options(func):
    for option in reversed((seed_option, arrivals_option, duplex_option, waiting_option, trace_option)):
        func = option(func)
    return func


def build_run_config(**values) -> RunConfig:
    """Validate CLI values into a RunConfig; validation problems become usage errors."""
    try:
        return RunConfig(**{key: value for key, value in values.items() if value is not None})
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first.get("loc", ()))
        message = first.get("msg", "invalid value")
        raise click.UsageError(f"{where}: {message}" if where else message) from e


def load_cluster(config: RunConfig) -> ClusterSpec:
    return TopologyService.load_cluster(config.cluster_path)


def load_workload(value: Path) -> Tuple[str, List[JobSpec]]:
    """Resolve -w: an existing file wins, then a bundled workload of that name."""
    path = Path(value)
    if path.is_file():
        return path.stem, WorkloadService.load_workload(path)
    bundled = path.name if path.suffix else f"{path.name}.json"
    if path.parent == Path(".") and bundled in WorkloadService.bundled_workload_names():
        return Path(bundled).stem, WorkloadService.load_bundled(bundled)
    raise SchemaError("", "cannot read workload file: no such file", str(value))


def load_placement(path: Path) -> Placement:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SchemaError("", f"cannot read placement file: {e.strerror or e}", str(path)) from e
    try:
        records = PlacementDocument.validate_json(text)
    except ValidationError as e:
        raise SchemaError.from_validation(e, str(path)) from e
    return Placement.from_records(records)


def mapping_options(config: RunConfig) -> MappingOptions:
    return MappingOptions(threshold_nodes=config.threshold_nodes)


def sim_options(config: RunConfig, record_messages: bool = False) -> SimulationOptions:
    return SimulationOptions(
        nic_duplex=config.nic_duplex,
        arrivals=config.arrivals,
        seed=config.seed,
        record_messages=record_messages,
    )


def default_out_dir(out: Optional[Path]) -> Path:
    return Path(out) if out is not None else Path(settings.OUTPUT_DIR)
