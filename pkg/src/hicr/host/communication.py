"""Direct-copy communication manager for a single-instance deployment.

Copies are applied synchronously at initiation under a mutex, so every
fence observes them complete.  Overlapping ranges are copied as if through
an intermediate buffer.  Global slots exist here too: the single instance
exchanges with itself, which lets frontends built on global slots (channels,
data objects) run unmodified in one process.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Any

from hicr.communication import (
    CommunicationManager,
    MemcpyDirection,
    TransferHandle,
    classify_memcpy,
    new_transfer_handle,
)
from hicr.errors import DuplicateKey, NotFound, UnsupportedSpacePair
from hicr.memory import GlobalMemorySlot, LocalMemorySlot, validate_slot_range


@dataclass(frozen=True)
class LocalToken:
    """Remote-access metadata for in-process slots: a direct reference."""

    owner: int
    slot: LocalMemorySlot

    @property
    def size_bytes(self) -> int:
        return self.slot.size_bytes


class _TagCounters:
    __slots__ = ("initiated", "completed")

    def __init__(self) -> None:
        self.initiated = 0
        self.completed = 0


class HostCommunicationManager(CommunicationManager):
    """Memcpy, fencing, and global-slot exchange within one OS process."""

    def __init__(self, instance_id: int = 0) -> None:
        self._lock = threading.Lock()
        self._instance_id = instance_id
        self._counters: dict[int, _TagCounters] = {}
        self._local_counters = _TagCounters()
        self._tables: dict[int, dict[int, GlobalMemorySlot]] = {}

    # -- introspection ---------------------------------------------------

    def transfer_counts(self, tag: int | None = None) -> tuple[int, int]:
        """(initiated, completed) for ``tag``, or for local transfers if None."""
        with self._lock:
            counters = self._local_counters if tag is None else self._counters.get(tag, _TagCounters())
            return counters.initiated, counters.completed

    # -- data movement ---------------------------------------------------

    def _resolve(self, slot: LocalMemorySlot | GlobalMemorySlot) -> LocalMemorySlot:
        if isinstance(slot, GlobalMemorySlot):
            if slot.manager is not self or slot.local is None:
                raise UnsupportedSpacePair(
                    f"global slot (tag={slot.tag}, key={slot.key}) was not produced by this manager"
                )
            return slot.local
        return slot

    def memcpy(
        self,
        dst: LocalMemorySlot | GlobalMemorySlot,
        dst_offset: int,
        src: LocalMemorySlot | GlobalMemorySlot,
        src_offset: int,
        size: int,
    ) -> TransferHandle:
        direction = classify_memcpy(dst, src)
        validate_slot_range(src, src_offset, size)
        validate_slot_range(dst, dst_offset, size)
        src_local = self._resolve(src)
        dst_local = self._resolve(dst)
        tag: int | None = None
        if direction is not MemcpyDirection.LOCAL_TO_LOCAL:
            tag = dst.tag if isinstance(dst, GlobalMemorySlot) else src.tag  # type: ignore[union-attr]
        with self._lock:
            counters = self._local_counters if tag is None else self._counters.setdefault(tag, _TagCounters())
            counters.initiated += 1
            # Snapshot-then-write gives intermediate-buffer semantics for overlap.
            data = src_local.read(src_offset, size)
            dst_local.write(dst_offset, data)
            counters.completed += 1
        return new_transfer_handle(tag, size)

    def fence(self, tag: int, timeout: float | None = None) -> None:
        # Copies complete at initiation; taking the lock orders this fence
        # after any initiation that is in flight on another thread.
        with self._lock:
            pass

    def fence_local(self, timeout: float | None = None) -> None:
        with self._lock:
            pass

    # -- global slots ------------------------------------------------------

    def exchange_global_slots(
        self, tag: int, contributions: list[tuple[int, LocalMemorySlot]]
    ) -> list[GlobalMemorySlot]:
        table: dict[int, GlobalMemorySlot] = {}
        for key, slot in contributions:
            if key in table:
                raise DuplicateKey(f"key {key} contributed twice under tag {tag}")
            table[key] = GlobalMemorySlot(
                tag=tag,
                key=key,
                owner=self._instance_id,
                size_bytes=slot.size_bytes,
                local=slot,
                token=LocalToken(self._instance_id, slot),
                manager=self,
            )
        with self._lock:
            self._tables[tag] = table
        return [table[k] for k in sorted(table)]

    def get_global_slot(self, tag: int, key: int) -> GlobalMemorySlot:
        with self._lock:
            table = self._tables.get(tag)
            if table is None or key not in table:
                raise NotFound(f"no global slot under (tag={tag}, key={key})")
            return table[key]

    # -- token-level access (used by the data-object frontend) -------------

    def make_token(self, slot: LocalMemorySlot) -> LocalToken:
        return LocalToken(self._instance_id, slot)

    def put_token(
        self,
        token: Any,
        dst_offset: int,
        src: LocalMemorySlot,
        src_offset: int,
        size: int,
        tag: int,
    ) -> TransferHandle:
        if not isinstance(token, LocalToken):
            raise UnsupportedSpacePair(f"token {token!r} is not reachable from this manager")
        validate_slot_range(src, src_offset, size)
        validate_slot_range(token.slot, dst_offset, size)
        with self._lock:
            counters = self._counters.setdefault(tag, _TagCounters())
            counters.initiated += 1
            token.slot.write(dst_offset, src.read(src_offset, size))
            counters.completed += 1
        return new_transfer_handle(tag, size)

    def get_token(
        self,
        dst: LocalMemorySlot,
        dst_offset: int,
        token: Any,
        src_offset: int,
        size: int,
        tag: int,
    ) -> TransferHandle:
        if not isinstance(token, LocalToken):
            raise UnsupportedSpacePair(f"token {token!r} is not reachable from this manager")
        validate_slot_range(token.slot, src_offset, size)
        validate_slot_range(dst, dst_offset, size)
        with self._lock:
            counters = self._counters.setdefault(tag, _TagCounters())
            counters.initiated += 1
            dst.write(dst_offset, token.slot.read(src_offset, size))
            counters.completed += 1
        return new_transfer_handle(tag, size)
