import csv

import pytest

from nicmap.core.exceptions import UnplacedProcess
from nicmap.models.placement import Placement
from nicmap.models.simulation import HopKind, ServerKey, ServerKind
from nicmap.schemas.cluster_schema import ClusterSpec, CoreId
from nicmap.schemas.run_schema import ArrivalMode, NicDuplex
from nicmap.services.mapping_service import MappingService
from nicmap.services.simulation_service import TRACE_COLUMNS, SimulationOptions, SimulationService
from nicmap.services.workload_service import WorkloadService
from tests.conftest import make_job, place

KB64 = 64 * 1024
NIC_64K = 61035


class TestRoute:

    def test_same_socket_cache(self, spec):
        """512 KiB on one socket goes through the cache"""
        placement = place(0, [(0, 1, 0), (0, 1, 2)])
        route = SimulationService.route(0, 0, 1, 512 * 1024, placement, spec)
        assert [hop.kind for hop in route.hops] == [HopKind.CACHE]
        assert route.hops[0].socket == 1

    def test_large_same_socket_memory(self, spec):
        """2 MiB exceeds the cache buffer and uses memory"""
        placement = place(0, [(0, 0, 0), (0, 0, 1)])
        route = SimulationService.route(0, 0, 1, 2 * 1024 * 1024, placement, spec)
        assert [hop.kind for hop in route.hops] == [HopKind.MEMORY]
        assert not route.cross_socket

    def test_cross_socket_memory(self, spec):
        placement = place(0, [(0, 0, 0), (0, 2, 0)])
        route = SimulationService.route(0, 0, 1, 1024, placement, spec)
        assert [hop.kind for hop in route.hops] == [HopKind.MEMORY]
        assert route.cross_socket

    def test_inter_node(self, spec):
        """Nodes 0 -> 5 cross egress, switch, ingress"""
        placement = place(0, [(0, 0, 0), (5, 0, 0)])
        route = SimulationService.route(0, 0, 1, KB64, placement, spec)
        assert [hop.kind for hop in route.hops] == [HopKind.NIC_EGRESS, HopKind.SWITCH, HopKind.NIC_INGRESS]
        assert route.hops[0].node == 0 and route.hops[2].node == 5
        assert route.is_inter_node

    def test_unplaced(self, spec):
        with pytest.raises(UnplacedProcess):
            SimulationService.route(0, 0, 1, 10, place(0, [(0, 0, 0)]), spec)


class TestServiceTime:

    def test_nic_64k(self, spec):
        """64 KiB at 1 GiB/s rounds to 61035 ns"""
        assert SimulationService.service_time(KB64, HopKind.NIC_EGRESS, spec) == NIC_64K
        assert SimulationService.service_time(KB64, HopKind.NIC_INGRESS, spec) == NIC_64K

    def test_memory_cross_socket(self, spec):
        """1 MiB at 4 GiB/s with the 10% remote penalty"""
        assert SimulationService.service_time(1024 * 1024, HopKind.MEMORY, spec, cross_socket=True) == 268555

    def test_memory_local(self, spec):
        assert SimulationService.service_time(2 * 1024 * 1024, HopKind.MEMORY, spec) == 488281

    def test_cache(self, spec):
        assert SimulationService.service_time(KB64, HopKind.CACHE, spec) == 7629

    def test_switch_flat(self, spec):
        """The switch costs 100 ns whatever the length"""
        assert SimulationService.service_time(1, HopKind.SWITCH, spec) == 100
        assert SimulationService.service_time(10 ** 9, HopKind.SWITCH, spec) == 100

    def test_length_positive(self, spec):
        with pytest.raises(ValueError):
            SimulationService.service_time(0, HopKind.CACHE, spec)


class TestSchedule:

    def test_periodic_releases(self):
        """100 msg/s: sends at 0, 10 ms, 20 ms"""
        job = make_job(processes=2, rate=100.0, count=3)
        timeline = SimulationService.schedule(job, WorkloadService.job_matrix(job))
        assert timeline[0] == [(0, 1), (10_000_000, 1), (20_000_000, 1)]

    def test_gather_non_root(self):
        """A gather non-root sends its whole count to process 0"""
        job = make_job(processes=4, pattern="gather_reduce", count=2000)
        timeline = SimulationService.schedule(job, WorkloadService.job_matrix(job))
        assert len(timeline[2]) == 2000
        assert {dst for _, dst in timeline[2]} == {0}
        assert timeline[0] == []

    def test_pure_receiver(self):
        """The last process of a linear chain never sends"""
        job = make_job(processes=4, pattern="linear")
        assert SimulationService.schedule(job, WorkloadService.job_matrix(job))[3] == []

    def test_round_robin_rotation(self):
        """Destinations cycle through the rotation starting above the sender"""
        job = make_job(processes=4, count=6)
        timeline = SimulationService.schedule(job, WorkloadService.job_matrix(job))
        assert [dst for _, dst in timeline[1]] == [2, 3, 0, 2, 3, 0]

    def test_explicit_streams_merge(self):
        """Each explicit edge is its own stream; ties go to the lower destination"""
        job = make_job(processes=3, pattern="explicit", matrix=[
            {"src": 0, "dst": 2, "length_bytes": 10, "rate_per_sec": 1000, "count": 2},
            {"src": 0, "dst": 1, "length_bytes": 10, "rate_per_sec": 500, "count": 2},
        ])
        timeline = SimulationService.schedule(job, WorkloadService.job_matrix(job))
        assert timeline[0] == [(0, 1), (0, 2), (1_000_000, 2), (2_000_000, 1)]

    def test_poisson_seeded(self):
        """Jittered releases start at 0, increase, and repeat for the same seed"""
        job = make_job(processes=2, count=50)
        m = WorkloadService.job_matrix(job)
        options = SimulationOptions(arrivals=ArrivalMode.POISSON, seed=7)
        first = SimulationService.schedule(job, m, options)
        assert first == SimulationService.schedule(job, m, options)
        times = [t for t, _ in first[0]]
        assert times[0] == 0
        assert times == sorted(times)
        other = SimulationService.schedule(job, m, SimulationOptions(arrivals=ArrivalMode.POISSON, seed=8))
        assert other != first

    def test_poisson_needs_seed(self):
        with pytest.raises(ValueError):
            SimulationOptions(arrivals=ArrivalMode.POISSON)


class TestRun:

    def test_single_message(self, spec):
        """One 64 KiB message between nodes: no waiting, delivered after both NIC hops and the switch"""
        job = make_job(processes=2, pattern="linear", count=1)
        raw = SimulationService.run([job], place(0, [(0, 0, 0), (1, 0, 0)]), spec)
        [msg] = raw.messages
        assert msg.waiting == 0
        assert msg.delivered_at == NIC_64K + 100 + NIC_64K
        assert raw.completion[(0, 0)] == NIC_64K
        assert raw.completion[(0, 1)] == msg.delivered_at

    def test_simultaneous_sends_serialize(self, spec):
        """Two releases at t=0 on one egress: the second waits one service time"""
        jobs = [
            make_job(job_id=0, processes=2, pattern="linear", count=1),
            make_job(job_id=1, processes=2, pattern="linear", count=1),
        ]
        placement = place(0, [(0, 0, 0), (1, 0, 0)])
        placement.assign(1, 0, CoreId(0, 0, 1))
        placement.assign(1, 1, CoreId(2, 0, 0))
        raw = SimulationService.run(jobs, placement, spec)
        egress = raw.servers[ServerKey(ServerKind.NIC_EGRESS, 0)]
        assert egress.served == 2
        assert egress.waiting_total == NIC_64K
        second = next(m for m in raw.messages if m.job == 1)
        assert second.hops[0].start == NIC_64K

    def test_half_duplex_shares_server(self, spec):
        """Half duplex puts egress and ingress of a node on one server"""
        jobs = [
            make_job(job_id=0, processes=2, pattern="linear", count=1),
            make_job(job_id=1, processes=2, pattern="linear", rate=16000.0, count=2),
        ]
        placement = place(0, [(0, 0, 0), (1, 0, 0)])
        placement.assign(1, 0, CoreId(1, 0, 1))
        placement.assign(1, 1, CoreId(0, 0, 1))
        full = SimulationService.run(jobs, placement, spec)
        half = SimulationService.run(jobs, placement, spec, SimulationOptions(nic_duplex=NicDuplex.HALF))
        assert all(key.kind is not ServerKind.NIC for key in full.servers)
        assert set(half.servers) == {ServerKey(ServerKind.NIC, 0), ServerKey(ServerKind.NIC, 1)}
        assert sum(s.waiting_total for s in full.servers.values()) == 0
        assert sum(s.waiting_total for s in half.servers.values()) > 0

    def test_switch_is_not_a_queue(self, spec):
        """Only channel servers appear; the switch adds delay without waiting"""
        job = make_job(processes=2, pattern="linear", count=3)
        raw = SimulationService.run([job], place(0, [(0, 0, 0), (3, 0, 0)]), spec)
        assert {key.kind for key in raw.servers} == {ServerKind.NIC_EGRESS, ServerKind.NIC_INGRESS}
        for msg in raw.messages:
            assert msg.hops[1].arrival == msg.hops[0].end + 100

    def test_conservation(self, spec):
        """Every released message is delivered once"""
        jobs = [make_job(job_id=0, processes=6, count=30), make_job(job_id=1, processes=5, pattern="bcast_scatter", count=12)]
        placement = Placement()
        cores = iter(spec.cores())
        for job in jobs:
            for process in range(job.num_processes):
                placement.assign(job.job_id, process, next(cores))
        raw = SimulationService.run(jobs, placement, spec)
        assert raw.sent == raw.delivered == {0: 180, 1: 12}
        assert len(raw.messages) == 192
        assert len({(m.job, m.src, m.seq) for m in raw.messages}) == 192

    def test_work_conservation(self, spec):
        """Busy time equals served work and no server idles with work queued"""
        jobs = WorkloadService.load_bundled("synt_workload_1")[:2]
        jobs = [job.model_copy(update={"msg_count": 40}) for job in jobs]
        placement = MappingService.map_cyclic(jobs, spec)
        raw = SimulationService.run(jobs, placement, spec)

        per_server = {}
        for msg in raw.messages:
            for hop in msg.hops:
                per_server.setdefault(hop.server, []).append(hop)
        for key, hops in per_server.items():
            hops.sort(key=lambda h: (h.start, h.arrival))
            server = raw.servers[key]
            assert server.busy_total == sum(h.end - h.start for h in hops)
            previous_end = 0
            for hop in hops:
                assert hop.arrival <= hop.start <= hop.end
                assert hop.start == max(hop.arrival, previous_end)
                previous_end = hop.end
            assert server.busy_total <= raw.horizon

    def test_causality(self, spec):
        """Delivery is never earlier than the zero-wait path"""
        job = make_job(processes=4, count=20, length=KB64)
        raw = SimulationService.run([job], place(0, [(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 2, 0)]), spec)
        for msg in raw.messages:
            service = sum(h.end - h.start for h in msg.hops)
            assert msg.delivered_at >= msg.created_at + service
            assert msg.waiting >= 0

    def test_deterministic(self, spec):
        job = make_job(processes=8, count=40)
        placement = place(0, [(n % 3, n // 3, 0) for n in range(8)])
        first = SimulationService.run([job], placement, spec)
        second = SimulationService.run([job], placement, spec)
        assert [(m.job, m.src, m.seq, m.hops, m.delivered_at) for m in first.messages] == \
            [(m.job, m.src, m.seq, m.hops, m.delivered_at) for m in second.messages]
        assert first.completion == second.completion

    def test_unrecorded_run_keeps_totals(self, spec):
        """Without per-message records the server totals are unchanged"""
        job = make_job(processes=4, count=25)
        placement = place(0, [(0, 0, 0), (1, 0, 0), (2, 0, 0), (0, 0, 1)])
        recorded = SimulationService.run([job], placement, spec)
        bare = SimulationService.run([job], placement, spec, SimulationOptions(record_messages=False))
        assert bare.messages == []
        assert bare.message_count == recorded.message_count
        assert {k: s.waiting_total for k, s in bare.servers.items()} == \
            {k: s.waiting_total for k, s in recorded.servers.items()}

    def test_unplaced_process(self, spec):
        job = make_job(processes=3)
        with pytest.raises(UnplacedProcess):
            SimulationService.run([job], place(0, [(0, 0, 0), (0, 0, 1)]), spec)


class TestMonotoneContention:

    def test_extra_message_never_reduces_waiting(self):
        """On one shared memory server, adding a sender never lowers anyone's waiting"""
        spec = ClusterSpec(num_nodes=1, sockets_per_node=2, cores_per_socket=4)
        base = make_job(job_id=0, processes=3, pattern="gather_reduce", length=2 * 1024 * 1024, rate=1500, count=12)
        extra = make_job(job_id=1, processes=2, pattern="linear", length=2 * 1024 * 1024, rate=2500, count=9)
        placement = place(0, [(0, 0, 0), (0, 1, 0), (0, 1, 1)])
        alone = SimulationService.run([base], placement, spec)

        placement.assign(1, 0, CoreId(0, 0, 1))
        placement.assign(1, 1, CoreId(0, 1, 2))
        shared = SimulationService.run([base, extra], placement, spec)

        before = {(m.src, m.seq): m.waiting for m in alone.messages}
        after = {(m.src, m.seq): m.waiting for m in shared.messages if m.job == 0}
        assert before.keys() == after.keys()
        assert all(after[key] >= before[key] for key in before)
        assert sum(after.values()) > sum(before.values())


class TestTrace:

    def test_trace_rows(self, spec, tmp_path):
        """One row per message hop with the documented columns"""
        job = make_job(processes=2, pattern="linear", count=2)
        raw = SimulationService.run([job], place(0, [(0, 0, 0), (1, 0, 0)]), spec)
        target = tmp_path / "trace.csv"
        assert SimulationService.write_trace(raw, target) == 4
        with open(target, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == TRACE_COLUMNS
        assert rows[1][6] == "nic_egress[0]"
        assert rows[2][6] == "nic_ingress[1]"


class TestMD1:

    def test_formula(self):
        """rho S / (2 (1 - rho))"""
        assert SimulationService.md1_mean_wait(0.5, 100.0) == pytest.approx(50.0)
        assert SimulationService.md1_mean_wait(0.0, 100.0) == 0

    def test_saturated(self):
        with pytest.raises(ValueError):
            SimulationService.md1_mean_wait(1.0, 100.0)
