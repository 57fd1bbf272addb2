from multiprocessing import Pool
from typing import Callable, Iterable, List


def ordered_map(func: Callable, items: Iterable, workers: int = 1,
                initializer: Callable = None, initargs: tuple = ()) -> List:
    """Map func over items, results in input order whatever the worker count.

    Per-process state goes through initializer, which runs once in every
    worker (or in this process when workers == 1).
    """
    items = list(items)
    if workers <= 1 or len(items) < 2:
        if initializer is not None:
            initializer(*initargs)
        return [func(item) for item in items]

    chunksize = max(1, len(items) // (workers * 8))
    with Pool(processes=workers, initializer=initializer, initargs=initargs) as pool:
        return pool.map(func, items, chunksize=chunksize)
