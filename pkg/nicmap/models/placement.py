from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from nicmap.core.exceptions import CoreAlreadyUsed, SchemaError, UnplacedProcess
from nicmap.schemas.cluster_schema import ClusterSpec, CoreId
from nicmap.schemas.placement_schema import PlacementRecord
from nicmap.schemas.workload_schema import JobSpec


@dataclass(frozen=True)
class Threshold:
    """Per-node cap on co-located processes of one job; None means unlimited."""
    value: Optional[int] = None

    def __post_init__(self):
        if self.value is not None and self.value < 1:
            raise ValueError("a bounded threshold must be at least 1")

    @classmethod
    def unlimited(cls) -> "Threshold":
        return cls(None)

    @property
    def is_unlimited(self) -> bool:
        return self.value is None

    def __str__(self):
        return "unlimited" if self.value is None else str(self.value)


class Placement:
    """Injective map from (job, process) to a core."""

    def __init__(self):
        self._assignment: Dict[Tuple[int, int], CoreId] = {}
        self._owners: Dict[CoreId, Tuple[int, int]] = {}

    def assign(self, job: int, process: int, core: CoreId) -> None:
        key = (job, process)
        if core in self._owners:
            raise CoreAlreadyUsed(core)
        if key in self._assignment:
            raise ValueError(f"process {process} of job {job} is already placed")
        self._assignment[key] = core
        self._owners[core] = key

    def core_of(self, job: int, process: int) -> CoreId:
        try:
            return self._assignment[(job, process)]
        except KeyError:
            raise UnplacedProcess(job, process) from None

    def __contains__(self, key: Tuple[int, int]) -> bool:
        return key in self._assignment

    def __len__(self) -> int:
        return len(self._assignment)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Placement):
            return NotImplemented
        return self._assignment == other._assignment

    def items(self) -> Iterator[Tuple[Tuple[int, int], CoreId]]:
        return iter(sorted(self._assignment.items()))

    def job_node_counts(self, job: int) -> Counter:
        return Counter(core.node for (j, _), core in self._assignment.items() if j == job)

    def node_counts(self) -> Dict[int, Dict[int, int]]:
        """node -> job -> number of that job's processes on the node."""
        counts: Dict[int, Dict[int, int]] = defaultdict(dict)
        for (job, _), core in self.items():
            counts[core.node][job] = counts[core.node].get(job, 0) + 1
        return dict(counts)

    def validate(self, jobs: Iterable[JobSpec], spec: ClusterSpec) -> None:
        """Check the placement is total for `jobs` and every core lies inside `spec`."""
        for job in jobs:
            for process in range(job.num_processes):
                self.core_of(job.job_id, process)
        for (job, process), core in self._assignment.items():
            if not spec.contains(core):
                raise SchemaError(
                    f"job {job} process {process}", f"core {tuple(core)} is outside the cluster"
                )

    def to_records(self) -> List[PlacementRecord]:
        return [
            PlacementRecord(job=job, process=process, node=core.node, socket=core.socket, core=core.core)
            for (job, process), core in self.items()
        ]

    @classmethod
    def from_records(cls, records: Iterable[PlacementRecord]) -> "Placement":
        placement = cls()
        for record in records:
            placement.assign(record.job, record.process, CoreId(record.node, record.socket, record.core))
        return placement

    def __repr__(self):
        return f"Placement(processes={len(self._assignment)})"
