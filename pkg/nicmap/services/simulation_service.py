import csv
import heapq
import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import repeat
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from nicmap.core.exceptions import ReportError
from nicmap.core.logging_config import log_report, log_simulation
from nicmap.core.units import NS_PER_S
from nicmap.models.comm_matrix import CommMatrix
from nicmap.models.placement import Placement
from nicmap.models.simulation import (
    ChannelServer,
    Hop,
    HopKind,
    HopRecord,
    MessageRecord,
    RawResults,
    Route,
    ServerKey,
    ServerKind,
)
from nicmap.schemas.cluster_schema import ClusterSpec
from nicmap.schemas.run_schema import ArrivalMode, NicDuplex
from nicmap.schemas.workload_schema import JobSpec, Pattern
from nicmap.services.workload_service import WorkloadService

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["job", "src", "dst", "seq", "length", "created_ns", "hop", "arrival_ns", "start_ns", "end_ns"]

# (server, service time, delay before the next stage)
Stage = Tuple[ServerKey, int, int]


@dataclass(frozen=True)
class SimulationOptions:
    nic_duplex: NicDuplex = NicDuplex.FULL
    arrivals: ArrivalMode = ArrivalMode.PERIODIC
    seed: Optional[int] = None
    record_messages: bool = True

    def __post_init__(self):
        if self.arrivals is ArrivalMode.POISSON and self.seed is None:
            raise ValueError("poisson arrivals need a seed")


def _periodic(count: int, rate: float) -> Iterator[int]:
    period = NS_PER_S / rate
    for k in range(count):
        yield round(k * period)


def _poisson(count: int, rate: float, rng: np.random.Generator) -> Iterator[int]:
    gaps = rng.exponential(NS_PER_S / rate, size=count - 1)
    yield 0
    for value in np.cumsum(gaps):
        yield int(round(float(value)))


def _stream(count: int, rate: float, options: SimulationOptions, key: Sequence[int]) -> Iterator[int]:
    if options.arrivals is ArrivalMode.POISSON:
        return _poisson(count, rate, np.random.default_rng([options.seed, *key]))
    return _periodic(count, rate)


class SimulationService:

    @staticmethod
    def route(job: int, src: int, dst: int, length: int, placement: Placement, spec: ClusterSpec) -> Route:
        """Channel path of one message, from the placement coordinates and the message length."""
        a = placement.core_of(job, src)
        b = placement.core_of(job, dst)
        if a.node != b.node:
            return Route((Hop(HopKind.NIC_EGRESS, a.node), Hop(HopKind.SWITCH, -1), Hop(HopKind.NIC_INGRESS, b.node)))
        if a.socket == b.socket and length <= spec.cache_msg_cap:
            return Route((Hop(HopKind.CACHE, a.node, a.socket),))
        return Route((Hop(HopKind.MEMORY, a.node),), cross_socket=a.socket != b.socket)

    @staticmethod
    def service_time(length: int, hop: HopKind, spec: ClusterSpec, cross_socket: bool = False) -> int:
        """Service of one transfer in nanoseconds, rounded to the nearest nanosecond."""
        if length <= 0:
            raise ValueError("message length must be positive")
        if hop is HopKind.SWITCH:
            return spec.switch_latency
        if hop is HopKind.CACHE:
            seconds = Fraction(length, spec.cache_bandwidth)
        elif hop is HopKind.MEMORY:
            seconds = Fraction(length, spec.mem_bandwidth)
            if cross_socket:
                seconds *= Fraction(str(spec.remote_mem_penalty))
        else:
            seconds = Fraction(length, spec.nic_bandwidth)
        return round(seconds * NS_PER_S)

    @staticmethod
    def releases(
        job: JobSpec,
        m: CommMatrix,
        process: int,
        options: Optional[SimulationOptions] = None,
    ) -> Iterator[Tuple[int, int]]:
        """(release time, destination) of each send of `process`, in send order.

        Patterned jobs send one stream at the job rate, destinations taken round-robin from
        the rotation. Explicit jobs run one stream per edge, merged by time (lower dst first).
        """
        options = options or SimulationOptions()
        if job.pattern is not Pattern.EXPLICIT:
            order = m.rotation(process)
            if not order:
                return iter(())
            total = sum(m.get(process, dst).count for dst in order)
            times = _stream(total, job.msg_rate, options, (job.job_id, process))
            return ((t, order[k % len(order)]) for k, t in enumerate(times))

        streams = []
        for dst in m.out_neighbors(process):
            edge = m.get(process, dst)
            times = _stream(edge.count, edge.rate, options, (job.job_id, process, dst))
            streams.append(zip(times, repeat(dst)))
        return heapq.merge(*streams)

    @staticmethod
    def schedule(job: JobSpec, m: CommMatrix, options: Optional[SimulationOptions] = None) -> List[List[Tuple[int, int]]]:
        """Send timeline of every process of the job."""
        return [list(SimulationService.releases(job, m, i, options)) for i in range(m.num_processes)]

    @staticmethod
    def _stages(route: Route, length: int, spec: ClusterSpec, duplex: NicDuplex) -> List[Stage]:
        stages: List[Stage] = []
        for hop in route.hops:
            if hop.kind is HopKind.SWITCH:
                server, service, delay = stages[-1]
                stages[-1] = (server, service, delay + spec.switch_latency)
                continue
            if hop.kind is HopKind.CACHE:
                key = ServerKey(ServerKind.CACHE, hop.node, hop.socket)
            elif hop.kind is HopKind.MEMORY:
                key = ServerKey(ServerKind.MEMORY, hop.node)
            elif duplex is NicDuplex.HALF:
                key = ServerKey(ServerKind.NIC, hop.node)
            else:
                key = ServerKey(ServerKind(hop.kind.value), hop.node)
            stages.append((key, SimulationService.service_time(length, hop.kind, spec, route.cross_socket), 0))
        return stages

    @staticmethod
    def run(
        jobs: Sequence[JobSpec],
        placement: Placement,
        spec: ClusterSpec,
        options: Optional[SimulationOptions] = None,
        label: str = "",
    ) -> RawResults:
        """Event-driven run of the whole workload over FIFO channel servers."""
        options = options or SimulationOptions()
        start_time = time.perf_counter()
        placement.validate(jobs, spec)

        servers: Dict[ServerKey, ChannelServer] = {}
        routes: Dict[Tuple[int, int, int], List[Stage]] = {}
        feeds: Dict[Tuple[int, int], Iterator[Tuple[int, int]]] = {}
        totals: Dict[Tuple[int, int], int] = {}
        completion: Dict[Tuple[int, int], int] = {}
        sent: Dict[int, int] = {}
        delivered: Dict[int, int] = {}
        messages: List[MessageRecord] = []
        lengths: Dict[Tuple[int, int, int], int] = {}
        events: list = []

        for job in jobs:
            m = WorkloadService.job_matrix(job)
            sent[job.job_id] = 0
            delivered[job.job_id] = 0
            for (src, dst), edge in m:
                lengths[(job.job_id, src, dst)] = edge.length
                path = SimulationService.route(job.job_id, src, dst, edge.length, placement, spec)
                routes[(job.job_id, src, dst)] = SimulationService._stages(path, edge.length, spec, options.nic_duplex)
            for process in range(job.num_processes):
                completion[(job.job_id, process)] = 0
                totals[(job.job_id, process)] = sum(m.get(process, d).count for d in m.out_neighbors(process))
                feed = SimulationService.releases(job, m, process, options)
                first = next(feed, None)
                if first is not None:
                    feeds[(job.job_id, process)] = feed
                    events.append((first[0], job.job_id, process, 0, 0, first[1], None))
        heapq.heapify(events)

        horizon = 0
        while events:
            now, job_id, src, seq, stage, dst, record = heapq.heappop(events)
            if stage == 0:
                sent[job_id] += 1
                upcoming = next(feeds[(job_id, src)], None)
                if upcoming is not None:
                    heapq.heappush(events, (upcoming[0], job_id, src, seq + 1, 0, upcoming[1], None))
                if options.record_messages:
                    record = MessageRecord(job_id, src, dst, seq, lengths[(job_id, src, dst)], now)
                    messages.append(record)

            stages = routes[(job_id, src, dst)]
            key, service, delay = stages[stage]
            server = servers.get(key)
            if server is None:
                server = servers[key] = ChannelServer(key)
            begin, end = server.admit(now, service)
            if record is not None:
                record.hops.append(HopRecord(key, now, begin, end))
            if end > horizon:
                horizon = end

            if stage == 0 and seq == totals[(job_id, src)] - 1:
                completion[(job_id, src)] = end
            if stage + 1 < len(stages):
                heapq.heappush(events, (end + delay, job_id, src, seq, stage + 1, dst, record))
                continue

            delivered[job_id] += 1
            if record is not None:
                record.delivered_at = end
            if totals[(job_id, dst)] == 0 and end > completion[(job_id, dst)]:
                completion[(job_id, dst)] = end

        raw = RawResults(
            jobs={job.job_id: job.num_processes for job in jobs},
            servers=dict(sorted(servers.items(), key=lambda item: item[0].label)),
            completion=completion,
            sent=sent,
            delivered=delivered,
            horizon=horizon,
            messages=messages,
        )
        log_simulation(label or "run", raw.message_count, horizon, time.perf_counter() - start_time)
        return raw

    @staticmethod
    def write_trace(raw: RawResults, target: Union[str, Path]) -> int:
        """Write one CSV row per (message, hop); returns the row count."""
        if raw.message_count and not raw.messages:
            raise ReportError(str(target), "the run did not record per-message data")
        rows = 0
        try:
            with open(target, "w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle)
                writer.writerow(TRACE_COLUMNS)
                for msg in raw.messages:
                    for hop in msg.hops:
                        writer.writerow([
                            msg.job, msg.src, msg.dst, msg.seq, msg.length, msg.created_at,
                            hop.server.label, hop.arrival, hop.start, hop.end,
                        ])
                        rows += 1
        except OSError as e:
            raise ReportError(str(target), e.strerror or str(e)) from e
        log_report(str(target), rows, "trace")
        return rows

    @staticmethod
    def md1_mean_wait(rho: float, service: float) -> float:
        """Mean queueing delay of an M/D/1 queue (Pollaczek-Khinchine)."""
        if not 0 <= rho < 1:
            raise ValueError("utilization must lie in [0, 1)")
        return rho * service / (2 * (1 - rho))
