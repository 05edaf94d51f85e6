import time
import uuid
from contextlib import contextmanager
from typing import Iterator

import psutil

from nicmap.core.logging_config import logger


def _rss_mib() -> float:
    return psutil.Process().memory_info().rss / (1024 * 1024)


@contextmanager
def track_run(kind: str, label: str) -> Iterator[str]:
    """Log start, completion (duration, resident memory) or failure of one unit of work.

    Yields the short run id so callers can tag their own log lines with it.
    """
    run_id = uuid.uuid4().hex[:8]
    start_time = time.perf_counter()

    logger.info(f"[{run_id}] {kind} {label} - Started")

    try:
        yield run_id
    except Exception as e:
        duration = time.perf_counter() - start_time
        logger.error(f"[{run_id}] {kind} {label} - Failed in {duration:.3f}s: {str(e)}")
        raise

    duration = time.perf_counter() - start_time
    logger.info(
        f"[{run_id}] {kind} {label} - Completed in {duration:.3f}s (rss {_rss_mib():.1f} MiB)"
    )
