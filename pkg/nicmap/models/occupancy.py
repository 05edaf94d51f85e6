from typing import Iterator, List, Optional, Set

from nicmap.core.exceptions import CoreAlreadyUsed
from nicmap.schemas.cluster_schema import ClusterSpec, CoreId


class Occupancy:
    """Free-core bookkeeping for one mapping run.

    per_node_free and per_socket_free are kept in step with `used`; a core is never
    claimed twice.
    """

    def __init__(self, spec: ClusterSpec):
        self.spec = spec
        self.used: Set[CoreId] = set()
        self.per_node_free: List[int] = [spec.cores_per_node] * spec.num_nodes
        self.per_socket_free: List[List[int]] = [
            [spec.cores_per_socket] * spec.sockets_per_node for _ in range(spec.num_nodes)
        ]

    @classmethod
    def empty(cls, spec: ClusterSpec) -> "Occupancy":
        return cls(spec)

    def copy(self) -> "Occupancy":
        clone = Occupancy.__new__(Occupancy)
        clone.spec = self.spec
        clone.used = set(self.used)
        clone.per_node_free = list(self.per_node_free)
        clone.per_socket_free = [list(row) for row in self.per_socket_free]
        return clone

    @property
    def total_free(self) -> int:
        return sum(self.per_node_free)

    def is_free(self, core: CoreId) -> bool:
        return core not in self.used

    def claim(self, core: CoreId) -> "Occupancy":
        if core in self.used:
            raise CoreAlreadyUsed(core)
        self.used.add(core)
        self.per_node_free[core.node] -= 1
        self.per_socket_free[core.node][core.socket] -= 1
        return self

    def lowest_free_core(self, node: int, socket: int) -> Optional[CoreId]:
        if self.per_socket_free[node][socket] == 0:
            return None
        for index in range(self.spec.cores_per_socket):
            core = CoreId(node, socket, index)
            if core not in self.used:
                return core
        return None

    def lowest_free_in_node(self, node: int) -> Optional[CoreId]:
        for socket in range(self.spec.sockets_per_node):
            core = self.lowest_free_core(node, socket)
            if core is not None:
                return core
        return None

    def free_cores(self, node: Optional[int] = None) -> Iterator[CoreId]:
        """Free cores in lexicographic order, optionally restricted to one node."""
        nodes = range(self.spec.num_nodes) if node is None else (node,)
        for n in nodes:
            if self.per_node_free[n] == 0:
                continue
            for socket in range(self.spec.sockets_per_node):
                if self.per_socket_free[n][socket] == 0:
                    continue
                for index in range(self.spec.cores_per_socket):
                    core = CoreId(n, socket, index)
                    if core not in self.used:
                        yield core

    def nodes_with_free_cores(self) -> List[int]:
        return [n for n, free in enumerate(self.per_node_free) if free > 0]

    def __repr__(self):
        return f"Occupancy(used={len(self.used)}, free={self.total_free})"
