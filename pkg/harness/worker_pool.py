import logging
from concurrent.futures import ProcessPoolExecutor
from os import cpu_count
from typing import Callable, Iterable


def get_pool_manager(logger, workers: int = None, initializer=None,
                     initargs: tuple = ()):
    """
    Get an instance of PoolManager.
    :param logger: the logger used.
    :param workers: the pool size, defaults to the available CPUs.
    :param initializer: called once in every worker, and in this process.
    :param initargs: arguments of the initializer.
    :return: the instance of PoolManager.
    """
    return PoolManager(workers or cpu_count() or 1, logger, initializer,
                       initargs)


class PoolManager:
    """
    A bounded process pool for per-instance work. With a single worker
    everything runs in this process.
    """

    def __init__(self, workers: int, logger, initializer=None,
                 initargs: tuple = ()):
        """
        Initialize the instance of this class.
        """
        self.workers = workers
        self.logger = logger
        self.initializer = initializer
        self.initargs = initargs
        self.executor = None
        if initializer is not None:
            initializer(*initargs)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        """
        Shut the worker processes down.
        """
        if self.executor is not None:
            self.executor.shutdown()
            self.executor = None

    def map(self, func: Callable, jobs: Iterable) -> list:
        """
        Apply `func` to every job.
        :param func: a module level function, so it can be pickled.
        :param jobs: the job arguments.
        :return: the results, in job order.
        """
        jobs = list(jobs)
        if self.workers <= 1 or len(jobs) <= 1:
            return [func(job) for job in jobs]
        if self.executor is None:
            self.logger.log(logging.DEBUG, f'Starting {self.workers} workers')
            self.executor = ProcessPoolExecutor(
                self.workers, initializer=self.initializer,
                initargs=self.initargs)
        chunk = max(1, len(jobs) // (4 * self.workers))
        return list(self.executor.map(func, jobs, chunksize=chunk))
