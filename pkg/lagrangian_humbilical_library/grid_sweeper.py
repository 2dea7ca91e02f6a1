'''
Threaded evaluation of a chart grid.

GridSweeper is a Thread that splits the grid into batches, feeds them to a Queue
drained by worker threads and hands results back through callbacks. Results are
re-assembled in grid order, so the outcome does not depend on the worker count.
'''

__version__ = "0.0.1"
__status__ = "Development"

import os
import timeit
import logging
from threading import Thread, Lock
from queue import Queue

import numpy as np

# Init the logger.
log = logging.getLogger(__name__)

DEFAULT_BATCH_SIZE = 64


def default_workers():
    return max(1, int(os.getenv("HUMBILICAL_WORKERS", "1")))


class GridSweeper(Thread):
    '''
    Evaluates a callable over batches of grid points on worker threads.

    ### Parameters:

        **points**: array_like (k, m)

        **evaluate**: callable
            Maps a (b, m) batch of points to a list of b results. Must be safe to
            call concurrently.

        **on_point_evaluated**: callable(index, point, result)
            Called from the worker thread for every evaluated point.

        **on_sweep_complete**: callable(results, duration)
            Called once with all results in grid order.

        **on_sweep_exception**: callable(exception)
            Called instead of on_sweep_complete when any evaluation raised.

        **workers**: int
            Defaults to the HUMBILICAL_WORKERS environment variable, else 1.

        **batch_size**: int
    '''

    def __init__(self,
                 points,
                 evaluate,
                 on_point_evaluated,
                 on_sweep_complete,
                 on_sweep_exception,
                 workers=None,
                 batch_size=DEFAULT_BATCH_SIZE):

        Thread.__init__(self)
        self._stop_sweep = False
        self._lock = Lock()

        self.points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        self.evaluate = evaluate
        self.on_point_evaluated_callback = on_point_evaluated
        self.on_sweep_complete_callback = on_sweep_complete
        self.on_sweep_exception_callback = on_sweep_exception
        self.workers = workers if workers else default_workers()
        self.batch_size = max(1, int(batch_size))

        self.batch_queue = Queue()
        self._results = {}
        self._errors = []

    def stop_thread(self):
        '''
        Stops queueing new batches; batches already queued are skipped.
        '''
        self._stop_sweep = True

    def run(self):
        try:
            start_time = timeit.default_timer()
            log.info(f'Sweeping {len(self.points)} grid points on {self.workers} worker(s)')

            worker_threads = [Thread(target=self.process_queue) for _ in range(self.workers)]
            for worker in worker_threads:
                worker.start()

            for first in range(0, len(self.points), self.batch_size):
                if self._stop_sweep:
                    break
                self.batch_queue.put((first, self.points[first:first + self.batch_size]))

            # One sentinel per worker.
            for _ in worker_threads:
                self.batch_queue.put(None)
            for worker in worker_threads:
                worker.join()

            if self._errors:
                raise self._errors[0]
            if self._stop_sweep:
                raise RuntimeError('Grid sweep stopped before completion')

            results = [self._results[index] for index in range(len(self.points))]
            duration = timeit.default_timer() - start_time
            log.info(f'Grid sweep completed in {duration:.3f}s')
            self.on_sweep_complete_callback(results, duration)

        except Exception as e:
            log.error(f'Error sweeping grid: {e}', exc_info=True)
            self.on_sweep_exception_callback(e)

    def process_queue(self):
        while True:
            item = self.batch_queue.get()
            if item is None:
                break
            if self._stop_sweep or self._errors:
                continue

            first, batch = item
            try:
                values = self.evaluate(batch)
                if len(values) != len(batch):
                    raise ValueError(f'Evaluation returned {len(values)} results for {len(batch)} points')
            except Exception as e:
                with self._lock:
                    self._errors.append(e)
                continue

            with self._lock:
                for offset, value in enumerate(values):
                    self._results[first + offset] = value
            for offset, value in enumerate(values):
                self.on_point_evaluated_callback(first + offset, batch[offset], value)


def sweep(points, evaluate, workers=None, batch_size=DEFAULT_BATCH_SIZE, on_point_evaluated=None):
    '''
    Runs a GridSweeper to completion and returns the results in grid order,
    re-raising any evaluation error in the calling thread.
    '''
    outcome = {}

    def on_complete(results, duration):
        outcome["results"] = results
        outcome["duration"] = duration

    def on_exception(error):
        outcome["error"] = error

    sweeper = GridSweeper(points, evaluate,
                          on_point_evaluated or (lambda index, point, value: None),
                          on_complete, on_exception, workers=workers, batch_size=batch_size)
    sweeper.start()
    sweeper.join()
    if "error" in outcome:
        raise outcome["error"]
    return outcome["results"]
