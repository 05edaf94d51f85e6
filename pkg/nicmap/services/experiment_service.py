import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import List, Optional, Sequence

import psutil

from nicmap.core.config import settings
from nicmap.core.tracing import track_run
from nicmap.models.placement import Placement
from nicmap.schemas.cluster_schema import ClusterSpec
from nicmap.schemas.metrics_schema import MetricsReport
from nicmap.schemas.run_schema import Strategy, WaitingScope
from nicmap.schemas.workload_schema import JobSpec
from nicmap.services.mapping_service import MappingOptions, MappingService
from nicmap.services.metrics_service import MetricsService
from nicmap.services.simulation_service import SimulationOptions, SimulationService
from nicmap.services.workload_service import WorkloadService

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Experiment:
    """One workload on one cluster, with everything a strategy run needs."""
    workload: str
    jobs: Sequence[JobSpec]
    spec: ClusterSpec
    mapping: MappingOptions = MappingOptions()
    simulation: SimulationOptions = SimulationOptions(record_messages=False)
    scope: WaitingScope = WaitingScope.ALL
    trace: Optional[Path] = None


def trace_path(base: Path, strategy: str, several: bool) -> Path:
    """Trace file of one strategy; several strategies get `<stem>_<strategy><suffix>`."""
    if not several:
        return base
    return base.with_name(f"{base.stem}_{strategy}{base.suffix or '.csv'}")


def worker_count(runs: int) -> int:
    workers = settings.MAX_WORKERS or psutil.cpu_count(logical=False) or 1
    return max(1, min(workers, runs))


def simulate_placement(experiment: Experiment, placement: Placement, label: str, trace: Optional[Path] = None) -> MetricsReport:
    options = experiment.simulation
    if trace is not None:
        options = replace(options, record_messages=True)
    raw = SimulationService.run(experiment.jobs, placement, experiment.spec, options, label=f"{experiment.workload}/{label}")
    if trace is not None:
        SimulationService.write_trace(raw, trace)
    return MetricsService.aggregate(raw, experiment.workload, label, experiment.scope)


def run_strategy(experiment: Experiment, strategy: Strategy, trace: Optional[Path] = None) -> MetricsReport:
    """Map, simulate and aggregate one strategy; module level so worker processes can import it."""
    placement = MappingService.map_workload(strategy, experiment.jobs, experiment.spec, options=experiment.mapping)
    return simulate_placement(experiment, placement, strategy.value, trace)


class ExperimentService:

    @staticmethod
    def compare(experiment: Experiment, strategies: Sequence[Strategy]) -> List[MetricsReport]:
        """Run every strategy on the experiment; reports come back ordered by strategy name."""
        strategies = sorted({Strategy(s) for s in strategies}, key=lambda s: s.value)
        traces = {
            s: trace_path(experiment.trace, s.value, len(strategies) > 1) if experiment.trace else None
            for s in strategies
        }

        with track_run("compare", f"{experiment.workload} [{','.join(s.value for s in strategies)}]"):
            workers = worker_count(len(strategies))
            if workers == 1:
                reports = [run_strategy(experiment, s, traces[s]) for s in strategies]
            else:
                logger.debug(f"Running {len(strategies)} strategies on {workers} worker process(es)")
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    futures = [pool.submit(run_strategy, experiment, s, traces[s]) for s in strategies]
                    reports = [future.result() for future in futures]
        return reports

    @staticmethod
    def reproduce(
        spec: ClusterSpec,
        strategies: Sequence[Strategy] = tuple(Strategy),
        mapping: MappingOptions = MappingOptions(),
        simulation: SimulationOptions = SimulationOptions(record_messages=False),
        scope: WaitingScope = WaitingScope.ALL,
    ) -> List[MetricsReport]:
        """Compare the strategies on every bundled synthetic workload."""
        reports: List[MetricsReport] = []
        for name in WorkloadService.bundled_workload_names():
            experiment = Experiment(
                workload=Path(name).stem,
                jobs=WorkloadService.load_bundled(name),
                spec=spec,
                mapping=mapping,
                simulation=simulation,
                scope=scope,
            )
            reports.extend(ExperimentService.compare(experiment, strategies))
        return reports
