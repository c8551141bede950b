"""Background jobs with debounced triggers.

Mutations enqueue recompute work (projections, graph rebuilds,
retrofitting) through a coalescing window so rapid edit bursts produce
one job per kind instead of a storm. Job state transitions are monotone
queued -> running -> done | failed, and outputs are snapshots that are
never overwritten.
"""

from __future__ import annotations

import threading
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

JOB_KINDS = ("projection", "graph_similarity", "retrofit")


@dataclass
class JobDescriptor:
    job_id: str
    kind: str
    state: str = "queued"  # queued | running | done | failed
    input_version: int = 0
    output_snapshot_id: Optional[str] = None
    error: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "state": self.state,
            "input_version": self.input_version,
            "output_snapshot_id": self.output_snapshot_id,
            "error": self.error,
        }


class JobScheduler:
    """Bounded worker pool plus per-key debounce timers."""

    def __init__(self, workers: int = 2, debounce_ms: int = 2000):
        self._executor = ThreadPoolExecutor(max_workers=workers)
        self._debounce_s = debounce_ms / 1000.0
        self._lock = threading.Lock()
        self._jobs: dict[str, JobDescriptor] = {}
        self._timers: dict[str, threading.Timer] = {}
        self._pending: dict[str, str] = {}  # debounce key -> queued job id
        self._counter = 0
        self._inflight = 0
        self._idle = threading.Condition(self._lock)
        self._closed = False

    def _new_descriptor(self, kind: str, input_version: int) -> JobDescriptor:
        if kind not in JOB_KINDS:
            raise ValueError(f"unknown job kind {kind!r}")
        self._counter += 1
        descriptor = JobDescriptor(job_id=f"job-{self._counter:06d}", kind=kind, input_version=input_version)
        self._jobs[descriptor.job_id] = descriptor
        return descriptor

    def get(self, job_id: str) -> Optional[JobDescriptor]:
        with self._lock:
            return self._jobs.get(job_id)

    def list(self) -> list[JobDescriptor]:
        with self._lock:
            return list(self._jobs.values())

    def submit(self, kind: str, work: Callable[[], Optional[str]], input_version: int = 0) -> JobDescriptor:
        """Enqueue immediately. work() returns the output snapshot id."""
        with self._lock:
            if self._closed:
                raise RuntimeError("scheduler is shut down")
            descriptor = self._new_descriptor(kind, input_version)
            self._inflight += 1
        self._executor.submit(self._run, descriptor, work)
        return descriptor

    def submit_debounced(
        self,
        key: str,
        kind: str,
        work: Callable[[], Optional[str]],
        input_version: int = 0,
    ) -> JobDescriptor:
        """Coalesce triggers: a pending job for the same key absorbs this
        trigger (its input_version advances and the window restarts)."""
        with self._lock:
            if self._closed:
                raise RuntimeError("scheduler is shut down")
            pending_id = self._pending.get(key)
            if pending_id is not None:
                descriptor = self._jobs[pending_id]
                descriptor.input_version = max(descriptor.input_version, input_version)
                self._timers[key].cancel()
            else:
                descriptor = self._new_descriptor(kind, input_version)
                self._pending[key] = descriptor.job_id
                self._inflight += 1
            timer = threading.Timer(self._debounce_s, self._fire, args=(key, descriptor, work))
            timer.daemon = True
            self._timers[key] = timer
            timer.start()
            return descriptor

    def _fire(self, key: str, descriptor: JobDescriptor, work: Callable[[], Optional[str]]) -> None:
        with self._lock:
            if self._pending.pop(key, None) is None:
                return  # shutdown raced the timer
            self._timers.pop(key, None)
        try:
            self._executor.submit(self._run_inner, descriptor, work)
        except RuntimeError:
            descriptor.state = "failed"
            descriptor.error = "scheduler shut down before the job could run"
            with self._lock:
                self._inflight -= 1
                self._idle.notify_all()

    def _run(self, descriptor: JobDescriptor, work: Callable[[], Optional[str]]) -> None:
        self._run_inner(descriptor, work)

    def _run_inner(self, descriptor: JobDescriptor, work: Callable[[], Optional[str]]) -> None:
        descriptor.state = "running"
        try:
            descriptor.output_snapshot_id = work()
            descriptor.state = "done"
        except Exception:
            # failures are recorded on the descriptor, never raised
            descriptor.error = traceback.format_exc(limit=4)
            descriptor.state = "failed"
        finally:
            with self._lock:
                self._inflight -= 1
                self._idle.notify_all()

    def wait_idle(self, timeout: float = 30.0) -> bool:
        """Block until no job is queued, debouncing, or running."""
        deadline = time.monotonic() + timeout
        with self._idle:
            while self._inflight > 0:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return False
                self._idle.wait(remaining)
        return True

    def shutdown(self) -> None:
        with self._lock:
            self._closed = True
            timers = list(self._timers.items())
        for key, timer in timers:
            timer.cancel()
            with self._lock:
                if self._pending.pop(key, None) is not None:
                    self._inflight -= 1
                    self._idle.notify_all()
                self._timers.pop(key, None)
        self._executor.shutdown(wait=True)
