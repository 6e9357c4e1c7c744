import logging
from typing import Callable, Iterable, List, Optional

from joblib import Parallel, delayed

from recall_sentinel.cli.config import get_settings

task_log = logging.getLogger(__name__)


def worker_count(threads: Optional[int] = None) -> int:
    """RECALL_SENTINEL_THREADS caps the pool; 0 means all cores."""
    threads = get_settings().threads if threads is None else threads
    return -1 if threads <= 0 else threads


def parallel_map(func: Callable, items: Iterable, threads: Optional[int] = None) -> List:
    """Ordered map over a thread pool, so serial and parallel runs agree."""
    items = list(items)
    n_jobs = worker_count(threads)
    if n_jobs == 1 or len(items) <= 1:
        return [func(item) for item in items]
    task_log.debug(f"Dispatching {len(items)} tasks to {n_jobs} workers")
    return Parallel(n_jobs=n_jobs, prefer='threads')(delayed(func)(item) for item in items)
