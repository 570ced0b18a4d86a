"""Host communication manager: direct copies, fencing, in-process exchange."""

from __future__ import annotations

import random
import threading

import pytest

from hicr.communication import classify_memcpy
from hicr.errors import DuplicateKey, IllegalDirection, NotFound, OutOfBounds, UnsupportedSpacePair
from hicr.host.communication import HostCommunicationManager
from hicr.host.memory import HostMemoryManager
from hicr.topology import ComputeResource, Device, MemorySpace, Topology


@pytest.fixture()
def stack():
    spaces = (
        MemorySpace(0, 1 << 20, "host-ram"),
        MemorySpace(1, 1 << 20, "host-ram"),
        MemorySpace(2, 1 << 16, "scratch"),
    )
    topo = Topology((Device(0, "numa-domain", spaces, (ComputeResource(0, "cpu-core"),)),))
    return topo, HostMemoryManager(topo), HostCommunicationManager()


def test_local_copy_then_fence(stack):
    topo, mm, cm = stack
    space = topo.memory_spaces()[0]
    src = mm.allocate(space, 5)
    dst = mm.allocate(space, 5)
    src.write(0, b"hello")
    cm.memcpy(dst, 0, src, 0, 5)
    cm.fence_local()
    assert dst.read(0, 5) == b"hello"


def test_broadcast_to_all_memory_spaces(stack):
    # The same message lands in a fresh buffer in every memory space of
    # every device, then a single fence completes everything.
    topo, mm, cm = stack
    message = mm.allocate(topo.memory_spaces()[0], 16)
    message.write(0, b"0123456789abcdef")
    destinations = []
    for dev in topo.devices:
        for space in dev.memory_spaces:
            dst = mm.allocate(space, 16)
            cm.memcpy(dst, 0, message, 0, 16)
            destinations.append(dst)
    cm.fence_local()
    assert len(destinations) == 3
    for dst in destinations:
        assert dst.read(0, 16) == b"0123456789abcdef"


def test_overlapping_self_copy_uses_intermediate_buffer(stack):
    topo, mm, cm = stack
    slot = mm.allocate(topo.memory_spaces()[0], 6)
    slot.write(0, b"abcdef")
    cm.memcpy(slot, 2, slot, 0, 4)
    cm.fence_local()
    assert slot.read(0, 6) == b"ababcd"


def test_zero_size_copy_is_noop_but_counts(stack):
    topo, mm, cm = stack
    slot = mm.allocate(topo.memory_spaces()[0], 4)
    slot.write(0, b"keep")
    before = cm.transfer_counts()
    cm.memcpy(slot, 0, slot, 0, 0)
    cm.fence_local()
    assert slot.read(0, 4) == b"keep"
    after = cm.transfer_counts()
    assert after == (before[0] + 1, before[1] + 1)


def test_out_of_bounds_rejected_before_any_write(stack):
    topo, mm, cm = stack
    src = mm.allocate(topo.memory_spaces()[0], 8)
    dst = mm.allocate(topo.memory_spaces()[0], 8)
    with pytest.raises(OutOfBounds):
        cm.memcpy(dst, 4, src, 0, 8)


def test_fence_with_no_transfers_returns_immediately(stack):
    _, _, cm = stack
    cm.fence(tag=999)
    cm.fence_local()


def test_randomized_copy_graph_matches_shadow_oracle(stack):
    # Oracle: replay every copy on plain bytearrays in initiation order and
    # compare all buffers after the fence.
    topo, mm, cm = stack
    rng = random.Random(2024)
    space = topo.memory_spaces()[0]
    n, size = 8, 64
    slots = [mm.allocate(space, size) for _ in range(n)]
    shadows = [bytearray(size) for _ in range(n)]
    for i, slot in enumerate(slots):
        init = bytes(rng.randrange(256) for _ in range(size))
        slot.write(0, init)
        shadows[i][:] = init
    for _ in range(300):
        si, di = rng.randrange(n), rng.randrange(n)
        length = rng.randrange(0, size + 1)
        so = rng.randrange(0, size - length + 1)
        do = rng.randrange(0, size - length + 1)
        cm.memcpy(slots[di], do, slots[si], so, length)
        snapshot = bytes(shadows[si][so : so + length])
        shadows[di][do : do + length] = snapshot
    cm.fence_local()
    for slot, shadow in zip(slots, shadows):
        assert slot.read(0, size) == bytes(shadow)


def test_concurrent_initiation_is_safe(stack):
    topo, mm, cm = stack
    space = topo.memory_spaces()[0]
    src = mm.allocate(space, 8)
    src.write(0, b"PAYLOAD!")
    dsts = [mm.allocate(space, 8) for _ in range(64)]

    def copy_some(chunk):
        for dst in chunk:
            cm.memcpy(dst, 0, src, 0, 8)

    threads = [threading.Thread(target=copy_some, args=(dsts[i::4],)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    cm.fence_local()
    assert all(dst.read(0, 8) == b"PAYLOAD!" for dst in dsts)
    initiated, completed = cm.transfer_counts()
    assert initiated == completed == 64


# -- in-process global slots ----------------------------------------------------


def test_exchange_returns_self_owned_slots(stack):
    topo, mm, cm = stack
    space = topo.memory_spaces()[0]
    a = mm.allocate(space, 32)
    b = mm.allocate(space, 32)
    table = cm.exchange_global_slots(7, [(0, a), (1, b)])
    assert len(table) == 2
    assert all(g.local is not None for g in table)
    assert {g.key for g in table} == {0, 1}
    assert cm.get_global_slot(7, 0).local is a


def test_exchange_with_zero_contributions(stack):
    _, _, cm = stack
    assert cm.exchange_global_slots(3, []) == []


def test_duplicate_key_rejected(stack):
    topo, mm, cm = stack
    space = topo.memory_spaces()[0]
    a = mm.allocate(space, 8)
    b = mm.allocate(space, 8)
    with pytest.raises(DuplicateKey):
        cm.exchange_global_slots(5, [(0, a), (0, b)])


def test_get_global_slot_unknown_tag_or_key(stack):
    topo, mm, cm = stack
    space = topo.memory_spaces()[0]
    cm.exchange_global_slots(11, [(0, mm.allocate(space, 8))])
    with pytest.raises(NotFound):
        cm.get_global_slot(11, 99)
    with pytest.raises(NotFound):
        cm.get_global_slot(12, 0)


def test_global_to_global_rejected(stack):
    topo, mm, cm = stack
    space = topo.memory_spaces()[0]
    table = cm.exchange_global_slots(21, [(0, mm.allocate(space, 8)), (1, mm.allocate(space, 8))])
    with pytest.raises(IllegalDirection):
        cm.memcpy(table[0], 0, table[1], 0, 4)
    with pytest.raises(IllegalDirection):
        classify_memcpy(table[0], table[1])


def test_puts_and_gets_through_global_slots(stack):
    topo, mm, cm = stack
    space = topo.memory_spaces()[0]
    ring = mm.allocate(space, 16)
    (gslot,) = cm.exchange_global_slots(31, [(0, ring)])
    src = mm.allocate(space, 4)
    src.write(0, b"wxyz")
    cm.memcpy(gslot, 8, src, 0, 4)  # local -> global
    cm.fence(31)
    assert ring.read(8, 4) == b"wxyz"
    dst = mm.allocate(space, 4)
    cm.memcpy(dst, 0, gslot, 8, 4)  # global -> local
    cm.fence(31)
    assert dst.read(0, 4) == b"wxyz"


def test_foreign_global_slot_rejected(stack):
    topo, mm, cm = stack
    other = HostCommunicationManager()
    space = topo.memory_spaces()[0]
    ring = mm.allocate(space, 16)
    (gslot,) = other.exchange_global_slots(41, [(0, ring)])
    src = mm.allocate(space, 4)
    with pytest.raises(UnsupportedSpacePair):
        cm.memcpy(gslot, 0, src, 0, 4)
