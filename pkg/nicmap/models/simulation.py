from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Deque, Dict, List, NamedTuple, Optional, Tuple


class HopKind(Enum):
    CACHE = "cache"
    MEMORY = "memory"
    NIC_EGRESS = "nic_egress"
    SWITCH = "switch"
    NIC_INGRESS = "nic_ingress"


class ServerKind(Enum):
    CACHE = "cache"
    MEMORY = "memory"
    NIC_EGRESS = "nic_egress"
    NIC_INGRESS = "nic_ingress"
    NIC = "nic"  # half-duplex: egress and ingress share one server


class ServerKey(NamedTuple):
    kind: ServerKind
    node: int
    socket: int = -1

    @property
    def label(self) -> str:
        if self.kind is ServerKind.CACHE:
            return f"{self.kind.value}[{self.node}.{self.socket}]"
        return f"{self.kind.value}[{self.node}]"


class Hop(NamedTuple):
    kind: HopKind
    node: int
    socket: int = -1


@dataclass(frozen=True)
class Route:
    """[Cache] | [Memory] | [NicEgress, Switch, NicIngress]."""
    hops: Tuple[Hop, ...]
    cross_socket: bool = False

    @property
    def is_inter_node(self) -> bool:
        return self.hops[0].kind is HopKind.NIC_EGRESS


class ChannelServer:
    """FIFO single server (NIC side, node memory or socket cache).

    Transfers are admitted in arrival order; service starts when both the transfer has
    arrived and the previous one has left, so the server never idles with work queued.
    """

    __slots__ = ("key", "busy_until", "busy_total", "waiting_total", "served", "peak_queue", "_in_system")

    def __init__(self, key: ServerKey):
        self.key = key
        self.busy_until = 0
        self.busy_total = 0
        self.waiting_total = 0
        self.served = 0
        self.peak_queue = 0
        self._in_system: Deque[int] = deque()

    def admit(self, arrival: int, service: int) -> Tuple[int, int]:
        """Queue one transfer arriving at `arrival`; returns its (service_start, service_end)."""
        in_system = self._in_system
        while in_system and in_system[0] <= arrival:
            in_system.popleft()
        start = arrival if arrival > self.busy_until else self.busy_until
        end = start + service
        self.busy_until = end
        self.busy_total += service
        self.waiting_total += start - arrival
        self.served += 1
        in_system.append(end)
        if len(in_system) > self.peak_queue:
            self.peak_queue = len(in_system)
        return start, end

    @property
    def label(self) -> str:
        return self.key.label

    def __repr__(self):
        return f"ChannelServer({self.label}, served={self.served}, busy={self.busy_total}ns)"


class HopRecord(NamedTuple):
    server: ServerKey
    arrival: int
    start: int
    end: int

    @property
    def waiting(self) -> int:
        return self.start - self.arrival


@dataclass(slots=True)
class MessageRecord:
    job: int
    src: int
    dst: int
    seq: int
    length: int
    created_at: int
    hops: List[HopRecord] = field(default_factory=list)
    delivered_at: Optional[int] = None

    @property
    def waiting(self) -> int:
        return sum(hop.start - hop.arrival for hop in self.hops)


@dataclass
class RawResults:
    """Everything one simulation run produced."""
    jobs: Dict[int, int]  # job id -> process count
    servers: Dict[ServerKey, ChannelServer]
    completion: Dict[Tuple[int, int], int]  # (job, process) -> finish time
    sent: Dict[int, int]
    delivered: Dict[int, int]
    horizon: int
    messages: List[MessageRecord] = field(default_factory=list)

    @property
    def message_count(self) -> int:
        return sum(self.delivered.values())
