"""
Ordered parallel map over independent, immutable work items.
"""
from concurrent.futures import ThreadPoolExecutor

from roughlog.config import max_workers

__all__ = ['parallel_map']


def parallel_map(func, items, workers=None):
    """
    Apply ``func`` to every item, possibly in worker threads.

    Results come back in the order of ``items`` so that the output does not
    depend on the number of workers. numpy and scipy release the GIL in the
    linear algebra kernels that dominate the work items here.

    Parameters
    ----------
    func : callable
    items : iterable
    workers : `int`, optional
        Defaults to `roughlog.config.max_workers`. ``1`` runs serially.

    Returns
    -------
    `list`
    """
    items = list(items)
    if workers is None:
        workers = max_workers()
    workers = max(1, min(workers, len(items)))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
