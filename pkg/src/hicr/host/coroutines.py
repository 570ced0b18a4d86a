"""Compute manager running execution states as suspendable user contexts.

Bodies of kind ``coroutine`` receive a yield capability they may invoke at
any point to suspend; the state can later be resumed, on the same or a
different processing unit, with all local context intact.  Each live state
is backed by a parked OS thread with a small reserved stack: suspension and
resumption are queue handshakes between the driving flow and the state's
context, so a suspended state consumes no scheduler attention.  Finished
contexts return to a pool and are reused by fresh states.
"""

from __future__ import annotations

import itertools
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

COROUTINE_UNIT_KIND = "coroutine"

DEFAULT_STACK_BYTES = 256 * 1024

_stack_lock = threading.Lock()
_fiber_names = itertools.count(1)

# Set while a context thread runs a body, so current_yield() can find it.
_active = threading.local()


class CoroutineExecutionUnit(ExecutionUnit):
    """A function taking (argument, yield_capability), suspendable mid-run."""

    def __init__(self, body: Callable[[Any, Callable[[], None]], Any]) -> None:
        super().__init__(COROUTINE_UNIT_KIND, body)


def current_yield() -> Callable[[], None]:
    """The yield capability of the coroutine state running on this flow.

    Raises :class:`WrongLifecycle` when the caller is not inside a running
    coroutine body (e.g. from a plain thread state).
    """
    fn = getattr(_active, "yield_fn", None)
    if fn is None:
        raise WrongLifecycle("no coroutine execution state is running on this flow")
    return fn


class _Fiber:
    """A parked thread holding one state's context between resumptions.

    Every dispatch (initial start or resume) arrives on ``dispatches``
    together with the event the driving flow waits on; the context signals
    exactly that event when the state yields or finishes, so completion
    signals can never leak between dispatches even across pool reuse.
    """

    def __init__(self, manager: "CoroutineComputeManager") -> None:
        self.manager = manager
        self.states: "queue.SimpleQueue[ExecutionState | None]" = queue.SimpleQueue()
        self.dispatches: "queue.SimpleQueue[threading.Event]" = queue.SimpleQueue()
        with _stack_lock:
            previous = threading.stack_size()
            try:
                threading.stack_size(manager.stack_bytes)
            except (ValueError, RuntimeError):
                pass  # platform minimum is larger; keep the default
            try:
                self.thread = threading.Thread(
                    target=self._loop, name=f"hicr-ctx-{next(_fiber_names)}", daemon=True
                )
                self.thread.start()
            finally:
                try:
                    threading.stack_size(previous)
                except (ValueError, RuntimeError):
                    pass

    def _loop(self) -> None:
        while True:
            state = self.states.get()
            if state is None:
                return
            stopped = self.dispatches.get()

            def yield_fn(_state: ExecutionState = state) -> None:
                nonlocal stopped
                if threading.current_thread() is not self.thread or _state.lifecycle is not StateLifecycle.RUNNING:
                    raise WrongLifecycle("yield invoked outside its own running coroutine")
                transition_execution_state(_state, StateLifecycle.SUSPENDED)
                stopped.set()
                stopped = self.dispatches.get()  # parked until the next execute()

            _active.yield_fn = yield_fn
            try:
                state.result = state.unit.payload(state.argument, yield_fn)
            except BaseException as exc:
                state.error = exc
            finally:
                _active.yield_fn = None
            transition_execution_state(state, StateLifecycle.FINISHED)
            state._driver = None
            self.manager._release_fiber(self)
            stopped.set()


class CoroutineComputeManager(ComputeManager):
    """Runs ``coroutine`` execution units as cooperatively suspendable states."""

    def __init__(self, stack_bytes: int = DEFAULT_STACK_BYTES) -> None:
        self.stack_bytes = stack_bytes
        self._pool: list[_Fiber] = []
        self._pool_lock = threading.Lock()

    @property
    def supports_suspension(self) -> bool:
        return True

    def _acquire_fiber(self) -> _Fiber:
        with self._pool_lock:
            if self._pool:
                return self._pool.pop()
        return _Fiber(self)

    def _release_fiber(self, fiber: _Fiber) -> None:
        with self._pool_lock:
            self._pool.append(fiber)

    def accepts_unit(self, unit: ExecutionUnit) -> bool:
        return unit.kind == COROUTINE_UNIT_KIND

    def create_processing_unit(self, resource: ComputeResource) -> ProcessingUnit:
        pu = ProcessingUnit(resource)
        pu._driver = {"current": None, "stopped": None}
        return pu

    def initialize(self, pu: ProcessingUnit) -> None:
        transition_processing_unit(pu, PuLifecycle.READY)

    def create_execution_state(self, unit: ExecutionUnit, argument: Any = None) -> ExecutionState:
        if not self.accepts_unit(unit):
            raise UnsupportedUnitKind(f"coroutine compute manager cannot run {unit.kind!r} units")
        return ExecutionState(unit, argument)

    def execute(self, pu: ProcessingUnit, state: ExecutionState) -> None:
        if pu.lifecycle is not PuLifecycle.READY:
            raise WrongLifecycle(f"execute requires a ready processing unit, got {pu.lifecycle.value}")
        if state.lifecycle not in (StateLifecycle.INITIALIZED, StateLifecycle.SUSPENDED):
            raise WrongLifecycle(f"cannot execute a state that is {state.lifecycle.value}")
        fresh = state.lifecycle is StateLifecycle.INITIALIZED
        if fresh:
            fiber = self._acquire_fiber()
            state._driver = fiber
        else:
            fiber = state._driver
        transition_execution_state(state, StateLifecycle.RUNNING)
        transition_processing_unit(pu, PuLifecycle.EXECUTING)
        stopped = threading.Event()
        pu._driver["current"] = state
        pu._driver["stopped"] = stopped
        if fresh:
            fiber.states.put(state)
        fiber.dispatches.put(stopped)

    def await_completion(self, pu: ProcessingUnit) -> None:
        state: ExecutionState | None = pu._driver["current"]
        if state is None:
            return
        stopped: threading.Event = pu._driver["stopped"]
        stopped.wait()
        pu._driver["current"] = None
        pu._driver["stopped"] = None
        transition_processing_unit(pu, PuLifecycle.READY)
        if state.lifecycle is StateLifecycle.FINISHED and state.error is not None:
            raise state.error

    def finalize(self, pu: ProcessingUnit) -> None:
        if pu.lifecycle is PuLifecycle.EXECUTING:
            self.await_completion(pu)
        transition_processing_unit(pu, PuLifecycle.TERMINATED)

    def shutdown(self) -> None:
        """Retire pooled context threads (otherwise they park as daemons)."""
        with self._pool_lock:
            fibers, self._pool = self._pool, []
        for fiber in fibers:
            fiber.states.put(None)
        for fiber in fibers:
            fiber.thread.join(timeout=5)
