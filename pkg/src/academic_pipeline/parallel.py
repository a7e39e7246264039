"""Order-preserving map over independent runs."""
from concurrent.futures import ThreadPoolExecutor


def ordered_map(fn, items, workers=None):
    """``list(map(fn, items))``, optionally on a thread pool.

    Results always come back in input order, so output files do not depend
    on ``workers``. The compiled kernels release the GIL inside their loops.
    """
    items = list(items)
    if not workers or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
