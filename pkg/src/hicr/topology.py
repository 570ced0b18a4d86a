"""Hardware model of one instance: devices, memory spaces, compute resources.

A topology is a plain value: it can be copied, compared structurally, and
serialized to canonical JSON for broadcast to other instances.  The byte
format is fixed so that every backend and language binding agrees on it:

    {"devices":[{"deviceId":u32,"kind":str,
                 "memorySpaces":[{"spaceId":u32,"sizeBytes":u64,"kind":str}],
                 "computeResources":[{"resourceId":u32,"kind":str,"affinity":u32|null}]}]}

Field order is exactly as listed, encoding is UTF-8.
"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

from hicr.errors import MalformedTopology

_U32_MAX = 2**32 - 1
_U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class MemorySpace:
    """An explicitly addressable memory segment of non-zero physical size."""

    space_id: int
    size_bytes: int
    kind: str

    def __post_init__(self) -> None:
        if not 0 <= self.space_id <= _U32_MAX:
            raise ValueError(f"space_id out of u32 range: {self.space_id}")
        if not 0 < self.size_bytes <= _U64_MAX:
            raise ValueError(f"size_bytes must be positive: {self.size_bytes}")


@dataclass(frozen=True)
class ComputeResource:
    """A hardware or logical element capable of performing computation.

    ``affinity`` optionally names the logical core index a processing unit
    should bind to; backends treat it as a hint.
    """

    resource_id: int
    kind: str
    affinity: int | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.resource_id <= _U32_MAX:
            raise ValueError(f"resource_id out of u32 range: {self.resource_id}")
        if self.affinity is not None and not 0 <= self.affinity <= _U32_MAX:
            raise ValueError(f"affinity out of u32 range: {self.affinity}")


@dataclass(frozen=True)
class Device:
    """A single hardware element holding zero or more spaces and resources."""

    device_id: int
    kind: str
    memory_spaces: tuple[MemorySpace, ...] = ()
    compute_resources: tuple[ComputeResource, ...] = ()

    def __post_init__(self) -> None:
        if not 0 <= self.device_id <= _U32_MAX:
            raise ValueError(f"device_id out of u32 range: {self.device_id}")
        object.__setattr__(self, "memory_spaces", tuple(self.memory_spaces))
        object.__setattr__(self, "compute_resources", tuple(self.compute_resources))


@dataclass
class Topology:
    """Full or partial view of an instance's available hardware devices.

    ``degraded`` is set by topology managers that had to fall back to default
    values; it does not take part in equality or serialization.
    """

    devices: tuple[Device, ...] = ()
    degraded: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        self.devices = tuple(self.devices)
        seen_dev: set[int] = set()
        seen_space: set[int] = set()
        seen_res: set[int] = set()
        for dev in self.devices:
            if dev.device_id in seen_dev:
                raise ValueError(f"duplicate device_id {dev.device_id}")
            seen_dev.add(dev.device_id)
            for sp in dev.memory_spaces:
                if sp.space_id in seen_space:
                    raise ValueError(f"duplicate space_id {sp.space_id}")
                seen_space.add(sp.space_id)
            for cr in dev.compute_resources:
                if cr.resource_id in seen_res:
                    raise ValueError(f"duplicate resource_id {cr.resource_id}")
                seen_res.add(cr.resource_id)

    def memory_spaces(self) -> list[MemorySpace]:
        return [sp for dev in self.devices for sp in dev.memory_spaces]

    def compute_resources(self) -> list[ComputeResource]:
        return [cr for dev in self.devices for cr in dev.compute_resources]


def serialize_topology(topology: Topology) -> bytes:
    """Encode a topology as canonical JSON bytes."""
    doc = {
        "devices": [
            {
                "deviceId": dev.device_id,
                "kind": dev.kind,
                "memorySpaces": [
                    {"spaceId": sp.space_id, "sizeBytes": sp.size_bytes, "kind": sp.kind}
                    for sp in dev.memory_spaces
                ],
                "computeResources": [
                    {"resourceId": cr.resource_id, "kind": cr.kind, "affinity": cr.affinity}
                    for cr in dev.compute_resources
                ],
            }
            for dev in topology.devices
        ]
    }
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")


def _require(cond: bool, what: str) -> None:
    if not cond:
        raise MalformedTopology(what)


def deserialize_topology(data: bytes) -> Topology:
    """Decode bytes produced by :func:`serialize_topology`.

    Raises :class:`MalformedTopology` for anything that does not round-trip.
    """
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedTopology(f"not valid topology JSON: {exc}") from exc
    _require(isinstance(doc, dict) and set(doc) == {"devices"}, "top-level must be {'devices': [...]}")
    _require(isinstance(doc["devices"], list), "'devices' must be a list")
    devices = []
    for dev in doc["devices"]:
        _require(isinstance(dev, dict), "device entry must be an object")
        _require(
            set(dev) == {"deviceId", "kind", "memorySpaces", "computeResources"},
            f"unexpected device fields: {sorted(dev)}",
        )
        _require(isinstance(dev["deviceId"], int) and isinstance(dev["kind"], str), "bad device header")
        spaces = []
        _require(isinstance(dev["memorySpaces"], list), "'memorySpaces' must be a list")
        for sp in dev["memorySpaces"]:
            _require(isinstance(sp, dict) and set(sp) == {"spaceId", "sizeBytes", "kind"}, "bad memory space")
            _require(isinstance(sp["spaceId"], int) and isinstance(sp["sizeBytes"], int), "bad memory space ints")
            _require(isinstance(sp["kind"], str), "memory space kind must be a string")
            spaces.append(MemorySpace(sp["spaceId"], sp["sizeBytes"], sp["kind"]))
        resources = []
        _require(isinstance(dev["computeResources"], list), "'computeResources' must be a list")
        for cr in dev["computeResources"]:
            _require(isinstance(cr, dict) and set(cr) == {"resourceId", "kind", "affinity"}, "bad compute resource")
            _require(isinstance(cr["resourceId"], int), "resourceId must be an int")
            _require(isinstance(cr["kind"], str), "compute resource kind must be a string")
            _require(cr["affinity"] is None or isinstance(cr["affinity"], int), "affinity must be int or null")
            resources.append(ComputeResource(cr["resourceId"], cr["kind"], cr["affinity"]))
        try:
            devices.append(Device(dev["deviceId"], dev["kind"], tuple(spaces), tuple(resources)))
        except ValueError as exc:
            raise MalformedTopology(str(exc)) from exc
    try:
        return Topology(tuple(devices))
    except ValueError as exc:
        raise MalformedTopology(str(exc)) from exc


class TopologyManager(ABC):
    """Discovers the devices visible to this instance.

    Repeated queries on an unchanged system return structurally equal
    topologies.
    """

    @abstractmethod
    def query_topology(self) -> Topology:
        """Return the devices this manager can see.

        Raises :class:`~hicr.errors.DiscoveryFailure` when the underlying
        system cannot be queried at all.
        """
