"""Order-preserving map over worker processes.

Results come back in input order, so outputs do not depend on ``workers``.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def parallel_map(fn, items, workers: int | None = 1):
    items = list(items)
    if not workers or workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
