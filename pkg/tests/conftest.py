import json
import os

# Select the testing profile before nicmap reads its settings
os.environ.setdefault("ENVIRONMENT", "testing")

import pytest
from click.testing import CliRunner

from nicmap.main import cli
from nicmap.models.occupancy import Occupancy
from nicmap.models.placement import Placement
from nicmap.schemas.cluster_schema import ClusterSpec, CoreId
from nicmap.schemas.workload_schema import JobSpec


def make_job(job_id=0, processes=4, pattern="all_to_all", length=64 * 1024, rate=100.0, count=None, matrix=None):
    """Build a JobSpec the way workload documents spell it.

    Without a count every process sends at least 10 messages and one per destination.
    """
    if count is None:
        count = max(10, processes - 1)
    data = {
        "id": job_id,
        "processes": processes,
        "pattern": pattern,
        "length_bytes": length,
        "rate_per_sec": rate,
        "message_count": count,
    }
    if matrix is not None:
        data["matrix"] = matrix
    return JobSpec.model_validate(data)


def place(job_id, cores):
    """Placement of one job whose process k runs on cores[k]."""
    placement = Placement()
    for process, core in enumerate(cores):
        placement.assign(job_id, process, CoreId(*core))
    return placement


@pytest.fixture
def spec():
    """The 16-node reference platform."""
    return ClusterSpec()


@pytest.fixture
def small_spec():
    """Two nodes, two sockets of two cores each."""
    return ClusterSpec(num_nodes=2, sockets_per_node=2, cores_per_socket=2)


@pytest.fixture
def occupancy(spec):
    return Occupancy.empty(spec)


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def invoke(runner):
    """Run the CLI in-process and return the click Result."""
    def _invoke(*args):
        return runner.invoke(cli, [str(arg) for arg in args], catch_exceptions=False)
    return _invoke


@pytest.fixture
def workload_file(tmp_path):
    """Write a workload document to a temporary file and return its path."""
    def _write(jobs, name="workload.json"):
        path = tmp_path / name
        path.write_text(json.dumps({"jobs": jobs}), encoding="utf-8")
        return path
    return _write
