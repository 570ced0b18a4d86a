"""Thread compute manager: parallel execution, lifecycle enforcement, pinning."""

from __future__ import annotations

import itertools
import os
import threading

import pytest

from hicr.errors import UnsupportedUnitKind, WrongLifecycle
from hicr.execution import StateLifecycle, run_to_completion
from hicr.host.coroutines import CoroutineExecutionUnit, current_yield
from hicr.host.threads import ThreadComputeManager, ThreadExecutionUnit
from hicr.host.topology import HostTopologyManager
from hicr.topology import ComputeResource


@pytest.fixture()
def cm():
    return ThreadComputeManager()


def resources(n):
    return [ComputeResource(i, "cpu-core", affinity=None) for i in range(n)]


def test_run_on_all_available_compute_resources(cm):
    # One state per compute resource, execute all, await all, finalize all:
    # every state finishes exactly once.
    topo = HostTopologyManager().query_topology()
    counter = itertools.count()
    unit = ThreadExecutionUnit(lambda arg: next(counter))
    states = run_to_completion(cm, topo.compute_resources(), lambda res: cm.create_execution_state(unit, res))
    assert all(s.lifecycle is StateLifecycle.FINISHED for s in states)
    results = sorted(s.result for s in states)
    assert results == list(range(len(topo.compute_resources())))


def test_finished_state_cannot_be_executed_again(cm):
    res = resources(1)[0]
    pu = cm.create_processing_unit(res)
    cm.initialize(pu)
    state = cm.create_execution_state(ThreadExecutionUnit(lambda a: a), 1)
    cm.execute(pu, state)
    cm.await_completion(pu)
    assert state.lifecycle is StateLifecycle.FINISHED
    with pytest.raises(WrongLifecycle):
        cm.execute(pu, state)
    cm.finalize(pu)


def test_shared_counter_incremented_once_per_state(cm):
    n = 8
    hits = []
    lock = threading.Lock()

    def body(arg):
        with lock:
            hits.append(arg)

    unit = ThreadExecutionUnit(body)
    seq = itertools.count()
    run_to_completion(cm, resources(n), lambda res: cm.create_execution_state(unit, next(seq)))
    assert sorted(hits) == list(range(n))


def test_states_run_genuinely_in_parallel(cm):
    # A barrier of width N only releases if all N states run concurrently.
    n = max(2, min(os.cpu_count() or 1, 4))
    barrier = threading.Barrier(n, timeout=20)
    unit = ThreadExecutionUnit(lambda arg: barrier.wait())
    states = run_to_completion(cm, resources(n), lambda res: cm.create_execution_state(unit, None))
    assert all(s.lifecycle is StateLifecycle.FINISHED for s in states)


def test_two_states_from_one_unit_run_independently(cm):
    unit = ThreadExecutionUnit(lambda arg: arg * arg)
    s1 = cm.create_execution_state(unit, 3)
    s2 = cm.create_execution_state(unit, 4)
    pu = cm.create_processing_unit(resources(1)[0])
    cm.initialize(pu)
    cm.execute(pu, s1)
    cm.await_completion(pu)
    cm.execute(pu, s2)
    cm.await_completion(pu)
    cm.finalize(pu)
    assert (s1.result, s2.result) == (9, 16)


def test_unsupported_unit_kind_rejected(cm):
    unit = CoroutineExecutionUnit(lambda a, y: None)
    with pytest.raises(UnsupportedUnitKind):
        cm.create_execution_state(unit, None)
    assert not cm.accepts_unit(unit)


def test_state_never_executed_stays_initialized(cm):
    state = cm.create_execution_state(ThreadExecutionUnit(lambda a: a), None)
    pu = cm.create_processing_unit(resources(1)[0])
    cm.initialize(pu)
    cm.finalize(pu)  # finalizable without ever running the state
    assert state.lifecycle is StateLifecycle.INITIALIZED


def test_execute_requires_ready_pu(cm):
    pu = cm.create_processing_unit(resources(1)[0])
    state = cm.create_execution_state(ThreadExecutionUnit(lambda a: a), None)
    with pytest.raises(WrongLifecycle):
        cm.execute(pu, state)  # still created, not initialized


def test_body_exception_reraised_at_await(cm):
    def explode(arg):
        raise RuntimeError("kaboom")

    pu = cm.create_processing_unit(resources(1)[0])
    cm.initialize(pu)
    state = cm.create_execution_state(ThreadExecutionUnit(explode), None)
    cm.execute(pu, state)
    with pytest.raises(RuntimeError, match="kaboom"):
        cm.await_completion(pu)
    assert state.lifecycle is StateLifecycle.FINISHED
    cm.finalize(pu)


def test_thread_states_reject_suspension(cm):
    # There is no yield capability inside a plain thread body.
    def body(arg):
        current_yield()

    pu = cm.create_processing_unit(resources(1)[0])
    cm.initialize(pu)
    state = cm.create_execution_state(ThreadExecutionUnit(body), None)
    cm.execute(pu, state)
    with pytest.raises(WrongLifecycle):
        cm.await_completion(pu)
    cm.finalize(pu)
    assert not cm.supports_suspension


# -- pinning ------------------------------------------------------------------


def test_pin_request_issued_for_hinted_resource(cm):
    pu = cm.create_processing_unit(ComputeResource(0, "cpu-core", affinity=0))
    cm.initialize(pu)
    cm.finalize(pu)
    assert (pu.pu_id, "core:0") in cm.pin_log


def test_unhinted_resource_stays_unpinned(cm):
    pu = cm.create_processing_unit(ComputeResource(0, "cpu-core", affinity=None))
    cm.initialize(pu)
    unit = ThreadExecutionUnit(lambda a: None)
    state = cm.create_execution_state(unit, None)
    cm.execute(pu, state)
    cm.await_completion(pu)
    cm.finalize(pu)
    assert pu.binding == "unpinned"
    assert state.lifecycle is StateLifecycle.FINISHED


def test_distinct_pin_requests_per_hinted_core(cm):
    cores = os.cpu_count() or 1
    hints = [i % cores for i in range(8)]
    pus = []
    for hint in hints:
        pu = cm.create_processing_unit(ComputeResource(hint, "cpu-core", affinity=hint))
        cm.initialize(pu)
        pus.append(pu)
    for pu in pus:
        cm.finalize(pu)
    log = dict(cm.pin_log)
    assert [log[pu.pu_id] for pu in pus] == [f"core:{h}" for h in hints]
