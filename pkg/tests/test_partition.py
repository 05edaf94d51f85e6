import itertools
import random

import networkx as nx
import pytest

from nicmap.services.partition_service import PartitionService
from nicmap.services.workload_service import WorkloadService
from tests.conftest import make_job


def optimal_balanced_cut(graph, size_a):
    """Exhaustive minimum cut over every split with |A| = size_a."""
    vertices = sorted(graph.nodes)
    best = None
    for a in itertools.combinations(vertices, size_a):
        b = set(vertices) - set(a)
        cut = nx.cut_size(graph, set(a), b, weight="weight")
        if best is None or cut < best:
            best = cut
    return best


def random_graph(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 12)
    graph = nx.Graph()
    graph.add_nodes_from(range(n))
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < 0.4:
            graph.add_edge(i, j, weight=rng.randint(1, 20))
    return graph


class TestBipartition:

    def test_two_heavy_pairs(self):
        """Heavy (0,1) and (2,3) with light cross edges split along the heavy pairs"""
        graph = nx.Graph()
        graph.add_edge(0, 1, weight=100)
        graph.add_edge(2, 3, weight=100)
        graph.add_edge(0, 2, weight=1)
        graph.add_edge(1, 3, weight=1)
        a, b = PartitionService.bipartition(graph)
        assert a == {0, 1}
        assert b == {2, 3}

    def test_two_vertices(self):
        """Two vertices split one each, the smaller in A"""
        graph = nx.Graph()
        graph.add_edge(0, 1, weight=5)
        assert PartitionService.bipartition(graph) == ({0}, {1})

    def test_edgeless(self):
        """Any 3/3 split of an edgeless graph has cut 0"""
        graph = nx.empty_graph(6)
        a, b = PartitionService.bipartition(graph)
        assert len(a) == len(b) == 3
        assert PartitionService.cut_weight(graph, a, b) == 0

    def test_odd_balance(self):
        """Odd vertex counts differ by one"""
        a, b = PartitionService.bipartition(nx.path_graph(7))
        assert {len(a), len(b)} == {3, 4}

    def test_target_size(self):
        """size_a fixes the size of A"""
        a, b = PartitionService.bipartition(nx.complete_graph(8), size_a=3)
        assert len(a) == 3 and len(b) == 5
        assert a | b == set(range(8))

    def test_invalid_size(self):
        with pytest.raises(ValueError):
            PartitionService.bipartition(nx.complete_graph(4), size_a=5)

    def test_deterministic(self):
        """The same graph always splits the same way"""
        graph = random_graph(3)
        assert PartitionService.bipartition(graph) == PartitionService.bipartition(graph)

    def test_two_cliques(self):
        """Two 4-cliques joined by one light edge separate cleanly"""
        graph = nx.Graph()
        for clique in ((0, 2, 4, 6), (1, 3, 5, 7)):
            for i, j in itertools.combinations(clique, 2):
                graph.add_edge(i, j, weight=10)
        graph.add_edge(0, 1, weight=1)
        a, b = PartitionService.bipartition(graph)
        assert a == {0, 2, 4, 6}
        assert PartitionService.cut_weight(graph, a, b) == 1

    def test_cut_never_exceeds_total(self):
        graph = random_graph(11)
        a, b = PartitionService.bipartition(graph)
        assert PartitionService.cut_weight(graph, a, b) <= graph.size(weight="weight")

    @pytest.mark.slow
    def test_against_exhaustive_oracle(self):
        """On 20 seeded graphs the cut is optimal at least 16 times and never 25% worse"""
        optimal = 0
        for seed in range(20):
            graph = random_graph(seed)
            n = graph.number_of_nodes()
            a, b = PartitionService.bipartition(graph)
            cut = PartitionService.cut_weight(graph, a, b)
            best = optimal_balanced_cut(graph, len(a))
            assert cut <= best * 1.25 + 1e-9
            optimal += cut <= best + 1e-9
            assert len(a) == (n + 1) // 2
        assert optimal >= 16


class TestProcessGraph:

    def test_weights_sum_directions(self):
        """Edge weight is the two-way pair demand"""
        m = WorkloadService.job_matrix(make_job(processes=3, length=10, rate=2.0, count=4))
        graph = PartitionService.build_process_graph(m)
        assert graph.number_of_edges() == 3
        assert graph[0][1]["weight"] == pytest.approx(40.0)

    def test_one_way_edges(self):
        """A linear chain keeps single-direction weights"""
        m = WorkloadService.job_matrix(make_job(processes=4, pattern="linear", length=10, rate=1.0))
        graph = PartitionService.build_process_graph(m)
        assert sorted(graph.edges) == [(0, 1), (1, 2), (2, 3)]
        assert graph[1][2]["weight"] == pytest.approx(10.0)

    def test_isolated_processes_kept(self):
        """Every process is a vertex even without traffic"""
        m = WorkloadService.job_matrix(make_job(processes=6, pattern="explicit", matrix=[
            {"src": 0, "dst": 1, "length_bytes": 10, "rate_per_sec": 1, "count": 1},
        ]))
        graph = PartitionService.build_process_graph(m)
        assert graph.number_of_nodes() == 6
