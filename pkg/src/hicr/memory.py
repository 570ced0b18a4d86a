"""Local and global memory slots plus the abstract memory manager contract.

A local memory slot describes one addressable buffer inside one instance:
its size, which memory space it lives in, and whether the manager owns the
storage (``ALLOCATED``) or merely recorded a caller-owned buffer
(``REGISTERED``).  A global memory slot is a local slot made reachable from
other instances through a collective exchange; it is identified deployment
wide by its (tag, key) pair.
"""

from __future__ import annotations

import itertools
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from hicr.errors import InvalidSlot, OutOfBounds, SlotPinned
from hicr.topology import MemorySpace

_slot_ids = itertools.count(1)
_slot_ids_lock = threading.Lock()


def _next_slot_id() -> int:
    with _slot_ids_lock:
        return next(_slot_ids)


class SlotOrigin(Enum):
    ALLOCATED = "allocated"
    REGISTERED = "registered"


class LocalMemorySlot:
    """A described segment of memory within one instance.

    Byte access goes through :meth:`read` and :meth:`write`, which enforce
    validity and bounds.  The backing storage is a writable contiguous
    buffer: a manager-owned ``bytearray`` for allocated slots, or whatever
    buffer the caller registered.
    """

    __slots__ = ("slot_id", "memory_space", "size_bytes", "origin", "valid", "pinned", "_view")

    def __init__(
        self,
        memory_space: MemorySpace,
        view: memoryview,
        origin: SlotOrigin,
        size_bytes: int | None = None,
    ) -> None:
        self.slot_id = _next_slot_id()
        self.memory_space = memory_space
        self.size_bytes = len(view) if size_bytes is None else size_bytes
        self.origin = origin
        self.valid = True
        self.pinned = False
        self._view = view

    def __repr__(self) -> str:
        return (
            f"LocalMemorySlot(id={self.slot_id}, size={self.size_bytes}, "
            f"origin={self.origin.value}, valid={self.valid})"
        )

    def check_range(self, offset: int, size: int) -> None:
        validate_slot_range(self, offset, size)

    def read(self, offset: int, size: int) -> bytes:
        self.check_range(offset, size)
        return bytes(self._view[offset : offset + size])

    def write(self, offset: int, data: bytes | bytearray | memoryview) -> None:
        self.check_range(offset, len(data))
        self._view[offset : offset + len(data)] = data

    def _invalidate(self) -> None:
        self.valid = False
        self._view = memoryview(b"")


def validate_slot_range(slot: "LocalMemorySlot | GlobalMemorySlot", offset: int, size: int) -> None:
    """Check that ``[offset, offset + size)`` lies inside the slot.

    Raises :class:`InvalidSlot` on an invalidated slot and
    :class:`OutOfBounds` when the range does not fit.  A zero-size range at
    ``offset == size_bytes`` is in bounds.
    """
    if isinstance(slot, GlobalMemorySlot):
        if slot.local is not None and not slot.local.valid:
            raise InvalidSlot(f"global slot (tag={slot.tag}, key={slot.key}) backs a freed local slot")
        limit = slot.size_bytes
    else:
        if not slot.valid:
            raise InvalidSlot(f"slot {slot.slot_id} is no longer valid")
        limit = slot.size_bytes
    if offset < 0 or size < 0:
        raise OutOfBounds(f"negative offset/size: {offset}/{size}")
    if offset + size > limit:
        raise OutOfBounds(f"range [{offset}, {offset + size}) exceeds slot size {limit}")


@dataclass
class GlobalMemorySlot:
    """A local slot made remotely reachable, identified by (tag, key).

    ``local`` is present exactly when the current instance owns the slot.
    ``token`` is backend-defined metadata that lets remote instances reach
    the storage; ``size_bytes`` mirrors the owning local slot's size so both
    ends can validate ranges.
    """

    tag: int
    key: int
    owner: int
    size_bytes: int
    local: LocalMemorySlot | None = None
    token: Any = None
    manager: Any = field(default=None, repr=False, compare=False)


class MemoryManager(ABC):
    """Allocation, registration, and freeing of local memory slots.

    A manager only operates on memory spaces it recognizes; passing a space
    discovered by a different backend raises
    :class:`~hicr.errors.UnknownMemorySpace`.
    """

    @abstractmethod
    def allocate(self, space: MemorySpace, size: int) -> LocalMemorySlot:
        """Allocate ``size > 0`` bytes in ``space`` and return a fresh slot.

        Raises :class:`~hicr.errors.OutOfMemory` when the space's tracked
        capacity would be exceeded by the live allocations.
        """

    @abstractmethod
    def register_external(self, space: MemorySpace, storage: Any, size: int | None = None) -> LocalMemorySlot:
        """Record an existing caller-owned buffer as a slot.

        ``storage`` is anything supporting the writable buffer protocol
        (``bytearray``, a NumPy array, ...).  Freeing the slot deregisters it
        but leaves the storage untouched.  Liveness of the storage remains
        the caller's responsibility.
        """

    @abstractmethod
    def free(self, slot: LocalMemorySlot) -> None:
        """Invalidate a slot, returning allocated storage to the space's pool.

        Raises :class:`~hicr.errors.InvalidSlot` on double free and
        :class:`~hicr.errors.SlotPinned` while a published data object still
        references the slot.
        """

    def _check_freeable(self, slot: LocalMemorySlot) -> None:
        if not slot.valid:
            raise InvalidSlot(f"slot {slot.slot_id} already freed")
        if slot.pinned:
            raise SlotPinned(f"slot {slot.slot_id} backs a published data object")
