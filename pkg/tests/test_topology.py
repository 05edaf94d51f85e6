import json
from fractions import Fraction

import pytest

from nicmap.core.exceptions import ClusterFull, CoreAlreadyUsed, SchemaError
from nicmap.models.occupancy import Occupancy
from nicmap.schemas.cluster_schema import ClusterSpec, CoreId
from nicmap.services.topology_service import TopologyService


class TestLoadCluster:

    def test_default_platform(self):
        """No source gives the 16x4x4 reference platform"""
        spec = TopologyService.load_cluster()
        assert (spec.num_nodes, spec.sockets_per_node, spec.cores_per_socket) == (16, 4, 4)
        assert spec.total_cores == 256
        assert spec.nic_bandwidth == 2 ** 30
        assert spec.switch_latency == 100

    def test_load_from_file(self, tmp_path):
        """A cluster file overrides only the fields it names"""
        path = tmp_path / "cluster.json"
        path.write_text(json.dumps({"num_nodes": 4, "cores_per_socket": 8}))
        spec = TopologyService.load_cluster(path)
        assert spec.num_nodes == 4
        assert spec.cores_per_node == 32
        assert spec.sockets_per_node == 4

    def test_unknown_field_rejected(self):
        """Misspelled fields are schema errors"""
        with pytest.raises(SchemaError) as exc:
            TopologyService.load_cluster({"num_node": 4})
        assert exc.value.path == "num_node"

    def test_invalid_value_reports_path(self):
        """The dotted field path is part of the error"""
        with pytest.raises(SchemaError) as exc:
            TopologyService.load_cluster({"num_nodes": 0})
        assert exc.value.path == "num_nodes"
        assert "num_nodes" in str(exc.value)

    def test_missing_file(self, tmp_path):
        """An unreadable file names the path"""
        missing = tmp_path / "absent.json"
        with pytest.raises(SchemaError) as exc:
            TopologyService.load_cluster(missing)
        assert str(missing) in str(exc.value)

    def test_bad_json(self, tmp_path):
        """Malformed JSON is a schema error, not a crash"""
        path = tmp_path / "cluster.json"
        path.write_text("{not json")
        with pytest.raises(SchemaError):
            TopologyService.load_cluster(path)


class TestOccupancy:

    def test_free_cores_avg_empty(self, spec, occupancy):
        """Empty reference platform averages 16 free cores per node"""
        assert TopologyService.free_cores_avg(occupancy, spec) == Fraction(16)

    def test_free_cores_avg_is_exact(self, spec, occupancy):
        """One claimed core leaves 255/16"""
        TopologyService.claim(occupancy, CoreId(0, 0, 0))
        assert TopologyService.free_cores_avg(occupancy, spec) == Fraction(255, 16)

    def test_claim_twice(self, occupancy):
        """A core cannot be claimed twice"""
        TopologyService.claim(occupancy, CoreId(3, 1, 2))
        with pytest.raises(CoreAlreadyUsed):
            TopologyService.claim(occupancy, CoreId(3, 1, 2))

    def test_claim_out_of_range(self, occupancy):
        """Cores outside the cluster are rejected"""
        with pytest.raises(ValueError):
            TopologyService.claim(occupancy, CoreId(16, 0, 0))

    def test_counters_follow_claims(self, occupancy):
        """Per-node and per-socket counters stay in step with the used set"""
        for core in (CoreId(2, 0, 0), CoreId(2, 0, 1), CoreId(2, 3, 3)):
            TopologyService.claim(occupancy, core)
        assert occupancy.per_node_free[2] == 13
        assert occupancy.per_socket_free[2] == [2, 4, 4, 3]
        assert occupancy.total_free == 253

    def test_copy_is_independent(self, occupancy):
        """Claims on a copy leave the original untouched"""
        clone = occupancy.copy()
        clone.claim(CoreId(0, 0, 0))
        assert occupancy.is_free(CoreId(0, 0, 0))
        assert not clone.is_free(CoreId(0, 0, 0))

    def test_free_cores_lexicographic(self, small_spec):
        """free_cores walks node, socket, core in order and skips used cores"""
        occ = Occupancy.empty(small_spec)
        occ.claim(CoreId(0, 0, 1))
        cores = list(occ.free_cores())
        assert cores[:3] == [CoreId(0, 0, 0), CoreId(0, 1, 0), CoreId(0, 1, 1)]
        assert cores == sorted(cores)
        assert len(cores) == small_spec.total_cores - 1


class TestSelectNodeSocket:

    def test_empty_cluster(self, spec, occupancy):
        """All ties go to node 0, socket 0"""
        assert TopologyService.select_node_socket(occupancy, spec) == (0, 0)

    def test_prefers_most_free_node(self, spec, occupancy):
        """Node 0 has lost a core, so node 1 wins"""
        occupancy.claim(CoreId(0, 0, 0))
        assert TopologyService.select_node_socket(occupancy, spec) == (1, 0)

    def test_prefers_most_free_socket(self, small_spec):
        """Inside the node, the socket with the most free cores wins"""
        occ = Occupancy.empty(small_spec)
        for core in (CoreId(0, 0, 0), CoreId(1, 0, 0), CoreId(1, 1, 0)):
            occ.claim(core)
        assert TopologyService.select_node_socket(occ, small_spec) == (0, 1)

    def test_eligibility_predicate(self, spec, occupancy):
        """Ineligible nodes are skipped"""
        node, socket = TopologyService.select_node_socket(occupancy, spec, eligible=lambda n: n >= 5)
        assert (node, socket) == (5, 0)

    def test_full_cluster(self, small_spec):
        """No free core anywhere raises ClusterFull"""
        occ = Occupancy.empty(small_spec)
        for core in small_spec.cores():
            occ.claim(core)
        with pytest.raises(ClusterFull):
            TopologyService.select_node_socket(occ, small_spec)


class TestClusterSpec:

    def test_contains(self, spec):
        """contains checks every coordinate"""
        assert spec.contains(CoreId(15, 3, 3))
        assert not spec.contains(CoreId(0, 4, 0))
        assert not spec.contains(CoreId(0, 0, -1))

    def test_frozen(self, spec):
        """Cluster specs are immutable"""
        with pytest.raises(Exception):
            spec.num_nodes = 3

    def test_cores_enumeration(self):
        """cores() yields every core once"""
        small = ClusterSpec(num_nodes=2, sockets_per_node=1, cores_per_socket=3)
        assert list(small.cores()) == [CoreId(n, 0, c) for n in range(2) for c in range(3)]
