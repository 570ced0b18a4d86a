"""Heap-backed memory manager with per-space capacity bookkeeping."""

from __future__ import annotations

import threading
from typing import Any

from hicr.errors import OutOfMemory, UnknownMemorySpace
from hicr.memory import LocalMemorySlot, MemoryManager, SlotOrigin
from hicr.topology import MemorySpace, Topology


class _SpaceState:
    __slots__ = ("space", "live_bytes")

    def __init__(self, space: MemorySpace) -> None:
        self.space = space
        self.live_bytes = 0


def _as_byte_view(storage: Any) -> memoryview:
    view = memoryview(storage)
    if view.readonly:
        raise ValueError("registered storage must be writable")
    if not view.contiguous:
        raise ValueError("registered storage must be contiguous")
    return view.cast("B")


class HostMemoryManager(MemoryManager):
    """Allocates slots from the process heap, one pool per known space.

    The capacity limit is soft (the heap could oversubscribe) but enforced:
    the sum of live allocated slot sizes per space never exceeds the space's
    physical size.  Spaces are recognized by object identity, so a space
    discovered by a different manager is rejected even if structurally equal.
    """

    def __init__(self, topology: Topology) -> None:
        self._lock = threading.Lock()
        self._spaces: dict[int, _SpaceState] = {
            id(sp): _SpaceState(sp) for sp in topology.memory_spaces()
        }

    def add_space(self, space: MemorySpace) -> None:
        """Recognize an additional space (e.g. from a second topology query)."""
        with self._lock:
            self._spaces.setdefault(id(space), _SpaceState(space))

    def _state_of(self, space: MemorySpace) -> _SpaceState:
        state = self._spaces.get(id(space))
        if state is None:
            raise UnknownMemorySpace(f"space {space.space_id} ({space.kind}) is not managed here")
        return state

    def live_bytes(self, space: MemorySpace) -> int:
        """Sum of live allocated slot sizes in ``space`` (registered slots excluded)."""
        with self._lock:
            return self._state_of(space).live_bytes

    def allocate(self, space: MemorySpace, size: int) -> LocalMemorySlot:
        if size <= 0:
            raise ValueError(f"allocation size must be positive, got {size}")
        with self._lock:
            state = self._state_of(space)
            if state.live_bytes + size > space.size_bytes:
                raise OutOfMemory(
                    f"space {space.space_id}: {state.live_bytes} live + {size} requested "
                    f"> capacity {space.size_bytes}"
                )
            state.live_bytes += size
        storage = bytearray(size)
        return LocalMemorySlot(space, memoryview(storage), SlotOrigin.ALLOCATED)

    def register_external(self, space: MemorySpace, storage: Any, size: int | None = None) -> LocalMemorySlot:
        with self._lock:
            self._state_of(space)
        view = _as_byte_view(storage)
        if size is None:
            size = len(view)
        elif size > len(view):
            raise ValueError(f"declared size {size} exceeds storage length {len(view)}")
        return LocalMemorySlot(space, view[:size], SlotOrigin.REGISTERED, size_bytes=size)

    def free(self, slot: LocalMemorySlot) -> None:
        self._check_freeable(slot)
        if slot.origin is SlotOrigin.ALLOCATED:
            with self._lock:
                state = self._state_of(slot.memory_space)
                state.live_bytes -= slot.size_bytes
        slot._invalidate()
