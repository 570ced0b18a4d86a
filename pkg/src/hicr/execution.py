"""Execution units, execution states, processing units, and the compute contract.

An execution unit is the static, replicable description of a function.  An
execution state is one run of a unit: it owns the run's full lifetime and is
single use.  A processing unit is an initialized compute resource that
drives execution states.

Lifecycle rules are enforced here, once, so every backend inherits them:

    execution state:  initialized -> running <-> suspended, running -> finished
    processing unit:  created -> ready -> executing -> ready,
                      executing <-> suspended, any -> terminated

``finished`` and ``terminated`` are terminal.
"""

from __future__ import annotations

import itertools
import threading
from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Callable

from hicr.errors import IllegalTransition
from hicr.topology import ComputeResource

_ids = itertools.count(1)
_ids_lock = threading.Lock()


def _next_id() -> int:
    with _ids_lock:
        return next(_ids)


class ExecutionUnit:
    """Immutable description of a function, identified by a kind label.

    ``payload`` is the callable (or other descriptor) a compute manager of
    matching kind knows how to run.
    """

    __slots__ = ("unit_id", "kind", "payload")

    def __init__(self, kind: str, payload: Any) -> None:
        self.unit_id = _next_id()
        self.kind = kind
        self.payload = payload

    def __repr__(self) -> str:
        return f"ExecutionUnit(id={self.unit_id}, kind={self.kind!r})"


class StateLifecycle(Enum):
    INITIALIZED = "initialized"
    RUNNING = "running"
    SUSPENDED = "suspended"
    FINISHED = "finished"


LEGAL_STATE_TRANSITIONS: frozenset[tuple[StateLifecycle, StateLifecycle]] = frozenset(
    {
        (StateLifecycle.INITIALIZED, StateLifecycle.RUNNING),
        (StateLifecycle.RUNNING, StateLifecycle.SUSPENDED),
        (StateLifecycle.SUSPENDED, StateLifecycle.RUNNING),
        (StateLifecycle.RUNNING, StateLifecycle.FINISHED),
    }
)


class PuLifecycle(Enum):
    CREATED = "created"
    READY = "ready"
    EXECUTING = "executing"
    SUSPENDED = "suspended"
    TERMINATED = "terminated"


LEGAL_PU_TRANSITIONS: frozenset[tuple[PuLifecycle, PuLifecycle]] = frozenset(
    {
        (PuLifecycle.CREATED, PuLifecycle.READY),
        (PuLifecycle.READY, PuLifecycle.EXECUTING),
        (PuLifecycle.EXECUTING, PuLifecycle.READY),
        (PuLifecycle.EXECUTING, PuLifecycle.SUSPENDED),
        (PuLifecycle.SUSPENDED, PuLifecycle.EXECUTING),
        (PuLifecycle.CREATED, PuLifecycle.TERMINATED),
        (PuLifecycle.READY, PuLifecycle.TERMINATED),
        (PuLifecycle.EXECUTING, PuLifecycle.TERMINATED),
        (PuLifecycle.SUSPENDED, PuLifecycle.TERMINATED),
    }
)


class ExecutionState:
    """One run of an execution unit, with its lifetime metadata.

    A finished state cannot be re-executed.  ``result`` and ``error`` record
    the body's outcome once the state finishes.
    """

    __slots__ = ("state_id", "unit", "argument", "lifecycle", "result", "error", "_driver")

    def __init__(self, unit: ExecutionUnit, argument: Any = None) -> None:
        self.state_id = _next_id()
        self.unit = unit
        self.argument = argument
        self.lifecycle = StateLifecycle.INITIALIZED
        self.result: Any = None
        self.error: BaseException | None = None
        self._driver: Any = None  # backend-owned run context

    def __repr__(self) -> str:
        return f"ExecutionState(id={self.state_id}, unit={self.unit.unit_id}, {self.lifecycle.value})"


def transition_execution_state(state: ExecutionState, to: StateLifecycle) -> ExecutionState:
    """Apply a lifecycle transition, rejecting anything outside the legal set."""
    if (state.lifecycle, to) not in LEGAL_STATE_TRANSITIONS:
        raise IllegalTransition(f"execution state cannot go {state.lifecycle.value} -> {to.value}")
    state.lifecycle = to
    return state


class ProcessingUnit:
    """A compute resource that has been initialized and can drive states."""

    __slots__ = ("pu_id", "resource", "lifecycle", "binding", "_driver")

    def __init__(self, resource: ComputeResource) -> None:
        self.pu_id = _next_id()
        self.resource = resource
        self.lifecycle = PuLifecycle.CREATED
        self.binding: str = "unpinned"
        self._driver: Any = None

    def __repr__(self) -> str:
        return f"ProcessingUnit(id={self.pu_id}, resource={self.resource.resource_id}, {self.lifecycle.value})"


def transition_processing_unit(pu: ProcessingUnit, to: PuLifecycle) -> ProcessingUnit:
    """Apply a processing-unit transition, rejecting anything outside the legal set."""
    if (pu.lifecycle, to) not in LEGAL_PU_TRANSITIONS:
        raise IllegalTransition(f"processing unit cannot go {pu.lifecycle.value} -> {to.value}")
    pu.lifecycle = to
    return pu


class ComputeManager(ABC):
    """Creates processing units and runs execution states on them.

    ``execute`` returns promptly while the state runs asynchronously; only
    ``await_completion`` blocks.  One execution state is driven by at most
    one processing unit at a time.
    """

    @property
    def supports_suspension(self) -> bool:
        """Whether states run by this manager may suspend and resume."""
        return False

    @abstractmethod
    def accepts_unit(self, unit: ExecutionUnit) -> bool:
        """Whether this manager can run execution units of this kind."""

    @abstractmethod
    def create_processing_unit(self, resource: ComputeResource) -> ProcessingUnit:
        """Wrap a compute resource into a processing unit (state ``created``)."""

    @abstractmethod
    def initialize(self, pu: ProcessingUnit) -> None:
        """Bring a created processing unit to ``ready``."""

    @abstractmethod
    def create_execution_state(self, unit: ExecutionUnit, argument: Any = None) -> ExecutionState:
        """Derive a fresh ``initialized`` state from a unit.

        Raises :class:`~hicr.errors.UnsupportedUnitKind` when the unit's
        kind is not accepted.  Multiple states may derive from one unit.
        """

    @abstractmethod
    def execute(self, pu: ProcessingUnit, state: ExecutionState) -> None:
        """Start (or resume) ``state`` on ``pu`` and return promptly.

        Requires ``pu`` ready and ``state`` initialized or suspended; a
        finished state raises :class:`~hicr.errors.WrongLifecycle`.
        """

    @abstractmethod
    def await_completion(self, pu: ProcessingUnit) -> None:
        """Block until the state driven by ``pu`` stops running.

        On return the state is finished (or suspended, for managers that
        support suspension) and ``pu`` is ready again.  An exception raised
        by the state's body is re-raised here.
        """

    @abstractmethod
    def finalize(self, pu: ProcessingUnit) -> None:
        """Move ``pu`` to ``terminated`` and release its resources."""


def run_to_completion(
    cm: ComputeManager,
    resources: list[ComputeResource],
    make_state: Callable[[ComputeResource], ExecutionState],
) -> list[ExecutionState]:
    """Run one state per resource in parallel and wait for all of them.

    Convenience wrapper over the create/initialize/execute/await/finalize
    sequence used whenever work is fanned out over every compute resource.
    """
    pus = []
    states = []
    for res in resources:
        pu = cm.create_processing_unit(res)
        cm.initialize(pu)
        state = make_state(res)
        cm.execute(pu, state)
        pus.append(pu)
        states.append(state)
    try:
        for pu in pus:
            cm.await_completion(pu)
    finally:
        for pu in pus:
            cm.finalize(pu)
    return states
