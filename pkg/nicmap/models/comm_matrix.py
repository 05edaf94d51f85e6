from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import Dict, Iterator, Mapping, Tuple


def rotate_after(ascending: Tuple[int, ...], pivot: int) -> Tuple[int, ...]:
    for position, value in enumerate(ascending):
        if value > pivot:
            return ascending[position:] + ascending[:position]
    return ascending


@dataclass(frozen=True, slots=True)
class CommEdge:
    """Demand on one directed pair: message length (bytes), rate (msg/s), message count."""
    length: int
    rate: float
    count: int

    @property
    def demand(self) -> float:
        return self.length * self.rate


class SizeClass(Enum):
    LARGE = "large"
    MEDIUM = "medium"
    SMALL = "small"

    @property
    def priority(self) -> int:
        # large jobs are mapped first, then medium, then small
        return {SizeClass.LARGE: 0, SizeClass.MEDIUM: 1, SizeClass.SMALL: 2}[self]


@dataclass(frozen=True)
class AdjacencyStats:
    adj: Tuple[int, ...]
    adj_avg: Fraction
    adj_max: int


class CommMatrix:
    """Immutable P×P demand matrix; absent entries (and the diagonal) carry no traffic."""

    def __init__(self, num_processes: int, edges: Mapping[Tuple[int, int], CommEdge]):
        if num_processes < 1:
            raise ValueError("a communication matrix needs at least one process")
        for (src, dst), edge in edges.items():
            if src == dst:
                raise ValueError(f"diagonal entry {src}->{dst} is not allowed")
            if not (0 <= src < num_processes and 0 <= dst < num_processes):
                raise ValueError(f"entry {src}->{dst} is outside 0..{num_processes - 1}")
            if edge.length <= 0 or edge.rate <= 0 or edge.count < 1:
                raise ValueError(f"entry {src}->{dst} needs length > 0, rate > 0 and count >= 1")

        self.num_processes = num_processes
        self._edges: Dict[Tuple[int, int], CommEdge] = dict(sorted(edges.items()))

        out = [[] for _ in range(num_processes)]
        incoming = [[] for _ in range(num_processes)]
        for src, dst in self._edges:
            out[src].append(dst)
            incoming[dst].append(src)
        self._out = tuple(tuple(sorted(row)) for row in out)
        self._in = tuple(tuple(sorted(row)) for row in incoming)
        self._neighbors = tuple(
            tuple(sorted(set(self._out[i]) | set(self._in[i]))) for i in range(num_processes)
        )

    @property
    def edges(self) -> Mapping[Tuple[int, int], CommEdge]:
        return MappingProxyType(self._edges)

    def get(self, src: int, dst: int) -> CommEdge | None:
        return self._edges.get((src, dst))

    def out_neighbors(self, i: int) -> Tuple[int, ...]:
        return self._out[i]

    def in_neighbors(self, i: int) -> Tuple[int, ...]:
        return self._in[i]

    def neighbors(self, i: int) -> Tuple[int, ...]:
        """Processes with traffic to or from i."""
        return self._neighbors[i]

    def rotation(self, i: int) -> Tuple[int, ...]:
        """Out-neighbors in ascending order, starting at the first one above i (wrapping)."""
        return rotate_after(self._out[i], i)

    def max_length(self) -> int:
        return max((edge.length for edge in self._edges.values()), default=0)

    def __iter__(self) -> Iterator[Tuple[Tuple[int, int], CommEdge]]:
        return iter(self._edges.items())

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CommMatrix):
            return NotImplemented
        return self.num_processes == other.num_processes and self._edges == other._edges

    def __repr__(self):
        return f"CommMatrix(P={self.num_processes}, edges={len(self._edges)})"
