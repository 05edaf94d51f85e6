import logging
import time
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from nicmap.core.exceptions import ClusterFull
from nicmap.core.logging_config import log_mapping
from nicmap.models.comm_matrix import AdjacencyStats, CommMatrix
from nicmap.models.occupancy import Occupancy
from nicmap.models.placement import Placement, Threshold
from nicmap.schemas.cluster_schema import ClusterSpec, CoreId
from nicmap.schemas.run_schema import Strategy, ThresholdNodes
from nicmap.schemas.workload_schema import JobSpec
from nicmap.services.partition_service import PartitionService
from nicmap.services.topology_service import TopologyService
from nicmap.services.workload_service import WorkloadService

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MappingOptions:
    threshold_nodes: ThresholdNodes = ThresholdNodes.ALL
    kl_restarts: Optional[int] = None


def _prepare(jobs: Sequence[JobSpec], spec: ClusterSpec, occupancy: Optional[Occupancy]) -> Occupancy:
    occ = occupancy.copy() if occupancy is not None else Occupancy.empty(spec)
    requested = sum(job.num_processes for job in jobs)
    if requested > occ.total_free:
        raise ClusterFull(requested, occ.total_free)
    return occ


def _place(placement: Placement, occ: Occupancy, job: int, process: int, core: CoreId) -> None:
    TopologyService.claim(occ, core)
    placement.assign(job, process, core)


class _JobPlacer:
    """Per-job state of the threshold strategy: the cursor node, its anchor socket and the cap."""

    def __init__(self, job: JobSpec, occ: Occupancy, spec: ClusterSpec, placement: Placement, cap: Optional[int]):
        self.job = job
        self.occ = occ
        self.spec = spec
        self.placement = placement
        self.cap = cap
        self.counts: Counter = Counter()
        self.node: Optional[int] = None
        self.anchor = 0

    def is_open(self, node: int) -> bool:
        return self.occ.per_node_free[node] > 0 and (self.cap is None or self.counts[node] < self.cap)

    def open_node(self) -> int:
        if self.node is not None and self.is_open(self.node):
            return self.node
        while True:
            try:
                self.node, self.anchor = TopologyService.select_node_socket(self.occ, self.spec, self.is_open)
                return self.node
            except ClusterFull:
                if self.cap is None:
                    raise
                # every node with a free core holds `cap` processes of this job already
                self.cap += 1
                logger.debug(f"Job {self.job.job_id}: per-node cap raised to {self.cap}")

    def place(self, process: int) -> None:
        node = self.open_node()
        if self.occ.per_socket_free[node][self.anchor] == 0:
            self.anchor = TopologyService.best_socket(self.occ, node)
        core = self.occ.lowest_free_core(node, self.anchor)
        _place(self.placement, self.occ, self.job.job_id, process, core)
        self.counts[node] += 1


class MappingService:

    @staticmethod
    def map_blocked(
        jobs: Sequence[JobSpec],
        spec: ClusterSpec,
        occupancy: Optional[Occupancy] = None,
        options: Optional[MappingOptions] = None,
    ) -> Placement:
        """Fill cores in (node, socket, core) order, one job after another."""
        occ = _prepare(jobs, spec, occupancy)
        placement = Placement()
        for job in jobs:
            for process in range(job.num_processes):
                _place(placement, occ, job.job_id, process, next(occ.free_cores()))
        return placement

    @staticmethod
    def map_cyclic(
        jobs: Sequence[JobSpec],
        spec: ClusterSpec,
        occupancy: Optional[Occupancy] = None,
        options: Optional[MappingOptions] = None,
    ) -> Placement:
        """Deal each job's processes round-robin over the nodes that still have free cores."""
        occ = _prepare(jobs, spec, occupancy)
        placement = Placement()
        for job in jobs:
            pointer = 0
            for process in range(job.num_processes):
                for step in range(spec.num_nodes):
                    node = (pointer + step) % spec.num_nodes
                    if occ.per_node_free[node] > 0:
                        break
                _place(placement, occ, job.job_id, process, occ.lowest_free_in_node(node))
                pointer = node + 1
        return placement

    @staticmethod
    def drb_domain(occ: Occupancy, count: int) -> List[CoreId]:
        """Cores offered to a job of `count` processes, in lexicographic order.

        Nodes are taken by descending free count (lowest index on ties); the last node
        contributes only its lowest free cores.
        """
        nodes = sorted(occ.nodes_with_free_cores(), key=lambda n: (-occ.per_node_free[n], n))
        domain: List[CoreId] = []
        for node in nodes:
            if len(domain) == count:
                break
            for core in occ.free_cores(node):
                domain.append(core)
                if len(domain) == count:
                    break
        if len(domain) < count:
            raise ClusterFull(count, occ.total_free)
        return sorted(domain)

    @staticmethod
    def split_cores(cores: Sequence[CoreId]) -> Tuple[List[CoreId], List[CoreId]]:
        """Cut a sorted core list at the highest level that tells its cores apart.

        Among the group boundaries at that level the most balanced one wins, earliest on ties.
        """
        n = len(cores)
        for depth in (1, 2, 3):
            boundaries = [i for i in range(1, n) if cores[i][:depth] != cores[i - 1][:depth]]
            if boundaries:
                cut = min(boundaries, key=lambda i: (abs(2 * i - n), i))
                return list(cores[:cut]), list(cores[cut:])
        raise ValueError("cannot split fewer than two cores")

    @staticmethod
    def map_drb(
        jobs: Sequence[JobSpec],
        spec: ClusterSpec,
        occupancy: Optional[Occupancy] = None,
        options: Optional[MappingOptions] = None,
    ) -> Placement:
        """Dual recursive bipartitioning of each job's process graph against its core domain."""
        options = options or MappingOptions()
        occ = _prepare(jobs, spec, occupancy)
        placement = Placement()

        for job in jobs:
            graph = PartitionService.build_process_graph(WorkloadService.job_matrix(job))
            pending = [(list(range(job.num_processes)), MappingService.drb_domain(occ, job.num_processes))]
            while pending:
                processes, cores = pending.pop()
                if len(processes) == 1:
                    _place(placement, occ, job.job_id, processes[0], cores[0])
                    continue
                left, right = MappingService.split_cores(cores)
                part_a, part_b = PartitionService.bipartition(
                    graph.subgraph(processes), size_a=len(left), restarts=options.kl_restarts
                )
                pending.append((sorted(part_b), right))
                pending.append((sorted(part_a), left))
        return placement

    @staticmethod
    def compute_threshold(
        stats: AdjacencyStats,
        occ: Occupancy,
        spec: ClusterSpec,
        threshold_nodes: ThresholdNodes = ThresholdNodes.ALL,
    ) -> Threshold:
        if stats.adj_max == 0:
            return Threshold.unlimited()
        if stats.adj_avg <= TopologyService.free_cores_avg(occ, spec) - 1:
            return Threshold.unlimited()

        weighted = Fraction(sum(stats.adj), stats.adj_max)
        if threshold_nodes is ThresholdNodes.FREE:
            nodes = max(len(occ.nodes_with_free_cores()), 1)
        else:
            nodes = spec.num_nodes
        return Threshold(max(1, floor(weighted / nodes)))

    @staticmethod
    def map_new(
        jobs: Sequence[JobSpec],
        spec: ClusterSpec,
        occupancy: Optional[Occupancy] = None,
        options: Optional[MappingOptions] = None,
    ) -> Placement:
        """Contention-aware mapping: size classes, adjacency order, per-node threshold.

        Large jobs go first, then medium, then small; inside a class the job with the
        higher average adjacency goes first. Each job's processes are taken by descending
        communication demand and their unmapped neighbors are pulled next to them, while the
        current node stays below the job's threshold.
        """
        options = options or MappingOptions()
        occ = _prepare(jobs, spec, occupancy)
        placement = Placement()

        prepared = []
        for job in jobs:
            m = WorkloadService.job_matrix(job)
            prepared.append((job, m, WorkloadService.adjacency_stats(m)))
        prepared.sort(key=lambda item: (WorkloadService.classify(item[0]).priority, -item[2].adj_avg, item[0].job_id))

        for job, m, stats in prepared:
            threshold = MappingService.compute_threshold(stats, occ, spec, options.threshold_nodes)
            logger.debug(f"Job {job.job_id}: adj_avg {float(stats.adj_avg):.2f}, threshold {threshold}")
            MappingService._map_job(job, m, occ, spec, placement, threshold)
        return placement

    @staticmethod
    def _map_job(
        job: JobSpec,
        m: CommMatrix,
        occ: Occupancy,
        spec: ClusterSpec,
        placement: Placement,
        threshold: Threshold,
    ) -> None:
        placer = _JobPlacer(job, occ, spec, placement, threshold.value)
        demand = [WorkloadService.comm_demand(m, i) for i in range(m.num_processes)]
        unmapped = set(range(m.num_processes))

        for a in sorted(range(m.num_processes), key=lambda i: (-demand[i], i)):
            if a not in unmapped:
                continue
            placer.place(a)
            unmapped.discard(a)
            walk = sorted(
                (j for j in m.neighbors(a) if j in unmapped),
                key=lambda j: (-WorkloadService.pair_demand(m, a, j), j),
            )
            for j in walk:
                placer.place(j)
                unmapped.discard(j)

    @staticmethod
    def map_workload(
        strategy: Strategy,
        jobs: Sequence[JobSpec],
        spec: ClusterSpec,
        occupancy: Optional[Occupancy] = None,
        options: Optional[MappingOptions] = None,
    ) -> Placement:
        strategy = Strategy(strategy)
        start_time = time.perf_counter()
        placement = STRATEGIES[strategy](jobs, spec, occupancy, options)
        placement.validate(jobs, spec)
        log_mapping(strategy.value, len(jobs), len(placement), time.perf_counter() - start_time)
        return placement

    @staticmethod
    def render_placement_table(placement: Placement, spec: ClusterSpec) -> str:
        """Per-node process counts, one row per node: `node  used/cores  job:count ...`."""
        counts = placement.node_counts()
        width = len(str(spec.num_nodes - 1))
        rows = [f"{'node':>{max(width, 4)}}  {'used':>7}  jobs"]
        for node in range(spec.num_nodes):
            per_job: Dict[int, int] = counts.get(node, {})
            used = sum(per_job.values())
            jobs = " ".join(f"j{job}:{count}" for job, count in sorted(per_job.items())) or "-"
            rows.append(f"{node:>{max(width, 4)}}  {f'{used}/{spec.cores_per_node}':>7}  {jobs}")
        return "\n".join(rows)


StrategyFn = Callable[..., Placement]

STRATEGIES: Dict[Strategy, StrategyFn] = {
    Strategy.BLOCKED: MappingService.map_blocked,
    Strategy.CYCLIC: MappingService.map_cyclic,
    Strategy.DRB: MappingService.map_drb,
    Strategy.NEW: MappingService.map_new,
}
