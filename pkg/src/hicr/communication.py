"""Direction rules and the abstract communication manager contract.

All data motion is expressed as ``memcpy`` between two slots.  Three
directions exist: local-to-local, local-to-global, and global-to-local.  A
global-to-global pairing would require a third party to orchestrate a
transfer between two remote instances and is rejected outright.

``memcpy`` only initiates a transfer; completion is observed through a
fence.  Transfers that involve a global slot complete under that slot's
exchange tag via :meth:`CommunicationManager.fence`; purely local copies
complete under :meth:`CommunicationManager.fence_local`.
"""

from __future__ import annotations

import itertools
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum

from hicr.errors import IllegalDirection
from hicr.memory import GlobalMemorySlot, LocalMemorySlot

_op_ids = itertools.count(1)
_op_ids_lock = threading.Lock()


def _next_op_id() -> int:
    with _op_ids_lock:
        return next(_op_ids)


class MemcpyDirection(Enum):
    LOCAL_TO_LOCAL = "localToLocal"
    LOCAL_TO_GLOBAL = "localToGlobal"
    GLOBAL_TO_LOCAL = "globalToLocal"


def classify_memcpy(
    dst: LocalMemorySlot | GlobalMemorySlot,
    src: LocalMemorySlot | GlobalMemorySlot,
) -> MemcpyDirection:
    """Classify a (destination, source) slot pairing into a legal direction.

    Raises :class:`IllegalDirection` when both slots are global.
    """
    dst_global = isinstance(dst, GlobalMemorySlot)
    src_global = isinstance(src, GlobalMemorySlot)
    if dst_global and src_global:
        raise IllegalDirection("global-to-global transfers are not representable")
    if dst_global:
        return MemcpyDirection.LOCAL_TO_GLOBAL
    if src_global:
        return MemcpyDirection.GLOBAL_TO_LOCAL
    return MemcpyDirection.LOCAL_TO_LOCAL


@dataclass(frozen=True)
class TransferHandle:
    """Identifies one initiated transfer; completion is observed via fences."""

    op_id: int
    tag: int | None
    size: int


def new_transfer_handle(tag: int | None, size: int) -> TransferHandle:
    return TransferHandle(_next_op_id(), tag, size)


class CommunicationManager(ABC):
    """Initiation, fencing, and global-slot exchange for one backend.

    Initiating calls (``memcpy``) return promptly; only fences block.  All
    methods are safe for concurrent invocation from multiple flows of
    execution within one instance.
    """

    @abstractmethod
    def memcpy(
        self,
        dst: LocalMemorySlot | GlobalMemorySlot,
        dst_offset: int,
        src: LocalMemorySlot | GlobalMemorySlot,
        src_offset: int,
        size: int,
    ) -> TransferHandle:
        """Initiate a copy of ``size`` bytes between two slot ranges.

        After the matching fence, the destination range equals the source
        range's bytes as they were at initiation time.  Zero-size transfers
        are no-ops that still count toward fence totals.
        """

    @abstractmethod
    def fence(self, tag: int, timeout: float | None = None) -> None:
        """Block until the expected transfers under ``tag`` have completed.

        Completion covers every transfer this instance initiated under the
        tag and, through the wire-carried expectation counts, every incoming
        transfer a fencing peer initiated toward this instance.  Errors
        detected remotely (e.g. an out-of-bounds put) surface here.  With no
        pending transfers the call returns immediately.
        """

    @abstractmethod
    def fence_local(self, timeout: float | None = None) -> None:
        """Block until every local-to-local transfer has completed."""

    @abstractmethod
    def exchange_global_slots(
        self, tag: int, contributions: list[tuple[int, LocalMemorySlot]]
    ) -> list[GlobalMemorySlot]:
        """Collectively exchange local slots under ``tag``.

        Every instance of the deployment must call this with the same tag,
        volunteering zero or more (key, slot) contributions.  Every
        participant receives the same table, whose cardinality is the sum of
        all contribution counts.  Duplicate keys raise
        :class:`~hicr.errors.DuplicateKey` on all participants.
        """

    @abstractmethod
    def get_global_slot(self, tag: int, key: int) -> GlobalMemorySlot:
        """Look up one slot from a completed exchange; raises NotFound."""
