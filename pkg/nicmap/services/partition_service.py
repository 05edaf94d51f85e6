import logging
import random
from typing import FrozenSet, Iterable, Optional, Tuple

import networkx as nx
from networkx.algorithms.community import kernighan_lin_bisection

from nicmap.core.config import settings
from nicmap.models.comm_matrix import CommMatrix
from nicmap.services.workload_service import WorkloadService

logger = logging.getLogger(__name__)

# passes per Kernighan-Lin run; the search stops earlier once a pass brings no gain
KL_MAX_ITER = 100


class PartitionService:

    @staticmethod
    def build_process_graph(m: CommMatrix) -> nx.Graph:
        """Undirected process graph; edge weight is L·λ summed over both directions."""
        graph = nx.Graph()
        graph.add_nodes_from(range(m.num_processes))
        for (src, dst), _ in m:
            if src < dst or m.get(dst, src) is None:
                graph.add_edge(src, dst, weight=WorkloadService.pair_demand(m, src, dst))
        return graph

    @staticmethod
    def cut_weight(graph: nx.Graph, a: Iterable[int], b: Iterable[int]) -> float:
        return nx.cut_size(graph, set(a), set(b), weight="weight")

    @staticmethod
    def bipartition(
        graph: nx.Graph,
        size_a: Optional[int] = None,
        restarts: Optional[int] = None,
    ) -> Tuple[FrozenSet[int], FrozenSet[int]]:
        """Split the vertices into A (|A| = size_a) and B with a small cut weight.

        Kernighan-Lin refinement runs from the index-order split and from `restarts` seeded
        random splits; the lowest cut wins, earliest start on ties. The default size_a is
        the balanced split; with equal halves, A is the side holding the smallest vertex.
        """
        vertices = sorted(graph.nodes)
        n = len(vertices)
        if size_a is None:
            size_a = (n + 1) // 2
        if not 0 <= size_a <= n:
            raise ValueError(f"part size {size_a} does not fit {n} vertices")
        if size_a in (0, n) or n < 2:
            a = frozenset(vertices[:size_a])
            return a, frozenset(vertices) - a
        if restarts is None:
            restarts = settings.KL_RESTARTS

        starts = [vertices]
        for r in range(1, restarts + 1):
            shuffled = list(vertices)
            random.Random(r).shuffle(shuffled)
            starts.append(shuffled)

        best = None
        best_cut = None
        for r, order in enumerate(starts):
            initial = (set(order[:size_a]), set(order[size_a:]))
            # networkx shuffles its internal labels even with a given partition
            left, right = kernighan_lin_bisection(
                graph, partition=initial, max_iter=KL_MAX_ITER, weight="weight", seed=r
            )
            cut = nx.cut_size(graph, left, right, weight="weight")
            if best_cut is None or cut < best_cut:
                best, best_cut = (left, right), cut

        left, right = best
        if len(left) != size_a or (2 * size_a == n and min(vertices) not in left):
            left, right = right, left
        logger.debug(f"Bisection of {n} vertices into {size_a}/{n - size_a}: cut {best_cut:g}")
        return frozenset(left), frozenset(right)
