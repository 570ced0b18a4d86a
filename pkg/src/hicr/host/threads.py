"""Compute manager mapping processing units one-to-one onto OS threads.

Each processing unit owns a dedicated worker thread, pinned best-effort to
the compute resource's hinted logical core.  Execution states of kind
``os-thread`` run their body directly on that thread; they cannot suspend.
"""

from __future__ import annotations

import os
import queue
import threading
from typing import Any, Callable

from hicr.errors import UnsupportedUnitKind, WrongLifecycle
from hicr.execution import (
    ComputeManager,
    ExecutionState,
    ExecutionUnit,
    ProcessingUnit,
    PuLifecycle,
    StateLifecycle,
    transition_execution_state,
    transition_processing_unit,
)
from hicr.topology import ComputeResource

THREAD_UNIT_KIND = "os-thread"


class ThreadExecutionUnit(ExecutionUnit):
    """Static description of a plain function run start-to-finish on a thread."""

    def __init__(self, body: Callable[[Any], Any]) -> None:
        super().__init__(THREAD_UNIT_KIND, body)


class _PuDriver:
    """The OS thread behind one processing unit."""

    def __init__(self, pu: ProcessingUnit, manager: "ThreadComputeManager") -> None:
        self.pu = pu
        self.manager = manager
        self.mailbox: "queue.SimpleQueue[ExecutionState | None]" = queue.SimpleQueue()
        self.idle = threading.Event()
        self.idle.set()
        self.current: ExecutionState | None = None
        self.thread = threading.Thread(
            target=self._loop, name=f"hicr-pu-{pu.pu_id}", daemon=True
        )

    def _pin(self) -> None:
        hint = self.pu.resource.affinity
        if hint is None:
            self.pu.binding = "unpinned"
            return
        try:
            os.sched_setaffinity(0, {hint})
            self.pu.binding = f"core:{hint}"
        except (AttributeError, OSError):
            self.pu.binding = "unpinned"
        self.manager._record_pin(self.pu.pu_id, self.pu.binding)

    def _loop(self) -> None:
        self._pin()
        while True:
            state = self.mailbox.get()
            if state is None:
                return
            try:
                state.result = state.unit.payload(state.argument)
            except BaseException as exc:  # surface at await_completion
                state.error = exc
            transition_execution_state(state, StateLifecycle.FINISHED)
            transition_processing_unit(self.pu, PuLifecycle.READY)
            self.idle.set()


class ThreadComputeManager(ComputeManager):
    """Runs ``os-thread`` execution units on per-unit pinned threads."""

    def __init__(self) -> None:
        self._pin_log: list[tuple[int, str]] = []
        self._pin_lock = threading.Lock()

    def _record_pin(self, pu_id: int, binding: str) -> None:
        with self._pin_lock:
            self._pin_log.append((pu_id, binding))

    @property
    def pin_log(self) -> list[tuple[int, str]]:
        """(pu_id, binding) records in initialization order, for inspection."""
        with self._pin_lock:
            return list(self._pin_log)

    def accepts_unit(self, unit: ExecutionUnit) -> bool:
        return unit.kind == THREAD_UNIT_KIND

    def create_processing_unit(self, resource: ComputeResource) -> ProcessingUnit:
        pu = ProcessingUnit(resource)
        pu._driver = _PuDriver(pu, self)
        return pu

    def initialize(self, pu: ProcessingUnit) -> None:
        transition_processing_unit(pu, PuLifecycle.READY)
        pu._driver.thread.start()

    def create_execution_state(self, unit: ExecutionUnit, argument: Any = None) -> ExecutionState:
        if not self.accepts_unit(unit):
            raise UnsupportedUnitKind(f"thread compute manager cannot run {unit.kind!r} units")
        return ExecutionState(unit, argument)

    def execute(self, pu: ProcessingUnit, state: ExecutionState) -> None:
        if pu.lifecycle is not PuLifecycle.READY:
            raise WrongLifecycle(f"execute requires a ready processing unit, got {pu.lifecycle.value}")
        if state.lifecycle is not StateLifecycle.INITIALIZED:
            raise WrongLifecycle(
                f"thread states run once and cannot resume; state is {state.lifecycle.value}"
            )
        driver: _PuDriver = pu._driver
        transition_execution_state(state, StateLifecycle.RUNNING)
        transition_processing_unit(pu, PuLifecycle.EXECUTING)
        driver.current = state
        driver.idle.clear()
        driver.mailbox.put(state)

    def await_completion(self, pu: ProcessingUnit) -> None:
        driver: _PuDriver = pu._driver
        driver.idle.wait()
        state, driver.current = driver.current, None
        if state is not None and state.error is not None:
            raise state.error

    def finalize(self, pu: ProcessingUnit) -> None:
        driver: _PuDriver = pu._driver
        if pu.lifecycle is PuLifecycle.EXECUTING:
            driver.idle.wait()
        transition_processing_unit(pu, PuLifecycle.TERMINATED)
        if driver.thread.is_alive():
            driver.mailbox.put(None)
            driver.thread.join()
