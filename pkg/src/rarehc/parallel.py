"""Order-preserving replicate map over an optional process pool."""

from concurrent.futures import ProcessPoolExecutor
import os


def resolve_workers(workers):
    if workers is None or workers == 0:
        return os.cpu_count() or 1
    return max(1, int(workers))


def map_replicates(fn, tasks, workers=1):
    """``[fn(t) for t in tasks]``, optionally fanned out to worker processes.

    Each task carries its own substream seed, so the result list is the
    same for any worker count.
    """
    tasks = list(tasks)
    workers = resolve_workers(workers)
    if workers == 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))
