import json
import logging
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, List, Tuple, Union

from pydantic import ValidationError

from nicmap.core.exceptions import PatternUndefined, SchemaError
from nicmap.core.units import KiB, MiB
from nicmap.models.comm_matrix import AdjacencyStats, CommEdge, CommMatrix, SizeClass, rotate_after
from nicmap.schemas.workload_schema import JobSpec, Pattern, WorkloadDocument

logger = logging.getLogger(__name__)

LARGE_MESSAGE = 1 * MiB
SMALL_MESSAGE = 2 * KiB

BUNDLED_PACKAGE = "nicmap.data"


def _pattern_destinations(pattern: Pattern, size: int) -> List[Tuple[int, ...]]:
    """Out-neighbors of each process, ascending."""
    if pattern is Pattern.ALL_TO_ALL:
        return [tuple(j for j in range(size) if j != i) for i in range(size)]
    if pattern is Pattern.BCAST_SCATTER:
        return [tuple(range(1, size))] + [()] * (size - 1)
    if pattern is Pattern.GATHER_REDUCE:
        return [()] + [(0,)] * (size - 1)
    if pattern is Pattern.LINEAR:
        return [(i + 1,) for i in range(size - 1)] + [()]
    raise ValueError(f"no fixed destinations for pattern {pattern.value}")


class WorkloadService:

    @staticmethod
    def expand_pattern(job: JobSpec) -> CommMatrix:
        """Pairwise demands of a patterned job.

        A sender's message_count is split over its destinations in rotation order, so
        earlier destinations carry one extra message when it does not divide evenly.
        """
        if job.pattern is Pattern.EXPLICIT:
            raise PatternUndefined(job.job_id)

        edges: Dict[Tuple[int, int], CommEdge] = {}
        for src, destinations in enumerate(_pattern_destinations(job.pattern, job.num_processes)):
            if not destinations:
                continue
            order = rotate_after(destinations, src)
            share, extra = divmod(job.msg_count, len(order))
            for position, dst in enumerate(order):
                count = share + (1 if position < extra else 0)
                edges[(src, dst)] = CommEdge(job.msg_length, job.msg_rate, count)
        return CommMatrix(job.num_processes, edges)

    @staticmethod
    def job_matrix(job: JobSpec) -> CommMatrix:
        """Expanded pattern, or the job's own matrix for explicit jobs."""
        if job.pattern is not Pattern.EXPLICIT:
            return WorkloadService.expand_pattern(job)
        return CommMatrix(
            job.num_processes,
            {
                (record.src, record.dst): CommEdge(record.length_bytes, record.rate_per_sec, record.count)
                for record in job.explicit_matrix
            },
        )

    @staticmethod
    def classify(job: JobSpec) -> SizeClass:
        # the largest message a job sends decides its class
        longest = WorkloadService.job_matrix(job).max_length()
        if longest >= LARGE_MESSAGE:
            return SizeClass.LARGE
        if longest < SMALL_MESSAGE:
            return SizeClass.SMALL
        return SizeClass.MEDIUM

    @staticmethod
    def adjacency_stats(m: CommMatrix) -> AdjacencyStats:
        adj = tuple(len(m.neighbors(i)) for i in range(m.num_processes))
        return AdjacencyStats(adj=adj, adj_avg=Fraction(sum(adj), m.num_processes), adj_max=max(adj))

    @staticmethod
    def comm_demand(m: CommMatrix, i: int) -> float:
        """Outgoing traffic rate of process i in bytes/second."""
        if not 0 <= i < m.num_processes:
            raise IndexError(f"process {i} is outside 0..{m.num_processes - 1}")
        return sum(m.get(i, j).demand for j in m.out_neighbors(i))

    @staticmethod
    def pair_demand(m: CommMatrix, i: int, j: int) -> float:
        """Traffic rate between i and j, both directions."""
        total = 0.0
        for edge in (m.get(i, j), m.get(j, i)):
            if edge is not None:
                total += edge.demand
        return total

    @staticmethod
    def load_workload(document: Union[dict, str, Path], source: str = None) -> List[JobSpec]:
        """Validate a workload document (mapping, or path to a JSON file); jobs keep file order."""
        if isinstance(document, (str, Path)):
            source = source or str(document)
            try:
                document = json.loads(Path(document).read_text(encoding="utf-8"))
            except OSError as e:
                raise SchemaError("", f"cannot read workload file: {e.strerror or e}", source) from e
            except json.JSONDecodeError as e:
                raise SchemaError("", f"invalid JSON: {e.msg} (line {e.lineno})", source) from e

        try:
            parsed = WorkloadDocument.model_validate(document)
        except ValidationError as e:
            raise SchemaError.from_validation(e, source) from e

        logger.debug(f"Workload {source or '<inline>'}: {len(parsed.jobs)} job(s)")
        return list(parsed.jobs)

    @staticmethod
    def dump_workload(jobs: List[JobSpec]) -> dict:
        return WorkloadDocument(jobs=jobs).model_dump(mode="json", by_alias=True, exclude_none=True)

    @staticmethod
    def bundled_workload_names() -> List[str]:
        return sorted(
            entry.name
            for entry in resources.files(BUNDLED_PACKAGE).iterdir()
            if entry.name.endswith(".json")
        )

    @staticmethod
    def load_bundled(name: str) -> List[JobSpec]:
        """Load a bundled workload by file name, with or without the .json suffix."""
        file_name = name if name.endswith(".json") else f"{name}.json"
        entry = resources.files(BUNDLED_PACKAGE).joinpath(file_name)
        if not entry.is_file():
            raise SchemaError("", f"no bundled workload named '{name}'")
        return WorkloadService.load_workload(json.loads(entry.read_text(encoding="utf-8")), source=file_name)
