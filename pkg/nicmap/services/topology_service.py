import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Tuple, Union

from pydantic import ValidationError

from nicmap.core.exceptions import ClusterFull, SchemaError
from nicmap.models.occupancy import Occupancy
from nicmap.schemas.cluster_schema import ClusterSpec, CoreId

logger = logging.getLogger(__name__)


class TopologyService:

    @staticmethod
    def load_cluster(source: Union[str, Path, dict, None] = None) -> ClusterSpec:
        """Read a cluster document; no source means the reference platform."""
        if source is None:
            return ClusterSpec()

        label = None
        if isinstance(source, dict):
            data = source
        else:
            label = str(source)
            try:
                data = json.loads(Path(source).read_text(encoding="utf-8"))
            except OSError as e:
                raise SchemaError("", f"cannot read cluster file: {e.strerror or e}", label) from e
            except json.JSONDecodeError as e:
                raise SchemaError("", f"invalid JSON: {e.msg} (line {e.lineno})", label) from e

        try:
            spec = ClusterSpec.model_validate(data)
        except ValidationError as e:
            raise SchemaError.from_validation(e, label) from e

        logger.debug(
            f"Cluster {spec.num_nodes}x{spec.sockets_per_node}x{spec.cores_per_socket} loaded"
            f" from {label or 'inline document'}"
        )
        return spec

    @staticmethod
    def free_cores_avg(occ: Occupancy, spec: ClusterSpec) -> Fraction:
        """Free cores per node, averaged over all nodes, as an exact fraction."""
        return Fraction(occ.total_free, spec.num_nodes)

    @staticmethod
    def claim(occ: Occupancy, core: CoreId) -> Occupancy:
        if not occ.spec.contains(core):
            raise ValueError(f"core {tuple(core)} is outside the cluster")
        return occ.claim(core)

    @staticmethod
    def best_socket(occ: Occupancy, node: int) -> int:
        """Socket of `node` with the most free cores, lowest index on ties."""
        row = occ.per_socket_free[node]
        best = 0
        for socket in range(1, len(row)):
            if row[socket] > row[best]:
                best = socket
        return best

    @staticmethod
    def select_node_socket(
        occ: Occupancy,
        spec: ClusterSpec,
        eligible: Optional[Callable[[int], bool]] = None,
    ) -> Tuple[int, int]:
        """Node with the most free cores, then its socket with the most free cores.

        Ties go to the lowest index. `eligible` narrows the candidate nodes.
        """
        best = None
        for node in range(spec.num_nodes):
            free = occ.per_node_free[node]
            if free == 0 or (eligible is not None and not eligible(node)):
                continue
            if best is None or free > occ.per_node_free[best]:
                best = node
        if best is None:
            raise ClusterFull(1, occ.total_free)
        return best, TopologyService.best_socket(occ, best)
