from typing import NamedTuple
from pydantic import BaseModel, ConfigDict, Field

from nicmap.core.units import GiB, MiB


class CoreId(NamedTuple):
    """Physical core coordinates; tuple order gives the (node, socket, core) lexicographic order."""
    node: int
    socket: int
    core: int


# Cluster geometry and channel parameters; defaults are the 16-node reference platform
class ClusterSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    num_nodes: int = Field(16, ge=1)
    sockets_per_node: int = Field(4, ge=1)
    cores_per_socket: int = Field(4, ge=1)
    mem_bandwidth: int = Field(4 * GiB, gt=0, description="bytes/second")
    remote_mem_penalty: float = Field(1.10, ge=1.0)
    # not given numerically for the reference chip; 8 GiB/s is an assumption
    cache_bandwidth: int = Field(8 * GiB, gt=0, description="bytes/second")
    cache_msg_cap: int = Field(1 * MiB, gt=0, description="bytes")
    nic_bandwidth: int = Field(1 * GiB, gt=0, description="bytes/second")
    switch_latency: int = Field(100, ge=0, description="nanoseconds")

    @property
    def cores_per_node(self) -> int:
        return self.sockets_per_node * self.cores_per_socket

    @property
    def total_cores(self) -> int:
        return self.num_nodes * self.cores_per_node

    def contains(self, core: CoreId) -> bool:
        return (
            0 <= core.node < self.num_nodes
            and 0 <= core.socket < self.sockets_per_node
            and 0 <= core.core < self.cores_per_socket
        )

    def cores(self):
        """Every core of the cluster in lexicographic order."""
        for node in range(self.num_nodes):
            for socket in range(self.sockets_per_node):
                for core in range(self.cores_per_socket):
                    yield CoreId(node, socket, core)
