"""Host topology discovery: OS-queried CPU/memory view or a synthetic spec."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from hicr.errors import MalformedTopology
from hicr.topology import (
    ComputeResource,
    Device,
    MemorySpace,
    Topology,
    TopologyManager,
    deserialize_topology,
)

_FALLBACK_CORES = 1
_FALLBACK_MEMORY = 1 << 30  # 1 GiB


class TopologyMode(Enum):
    OS_QUERY = "osQuery"
    SYNTHETIC = "synthetic"


@dataclass
class HostTopologyConfig:
    """Selects between querying the OS and echoing a synthetic topology."""

    mode: TopologyMode = TopologyMode.OS_QUERY
    synthetic_spec: Topology | None = None

    def __post_init__(self) -> None:
        if (self.mode is TopologyMode.SYNTHETIC) != (self.synthetic_spec is not None):
            raise ValueError("synthetic_spec must be present exactly when mode is synthetic")

    @classmethod
    def from_json_file(cls, path: str | Path) -> "HostTopologyConfig":
        """Load a config from topology JSON extended with a ``mode`` field."""
        doc = json.loads(Path(path).read_text("utf-8"))
        if not isinstance(doc, dict) or "mode" not in doc:
            raise MalformedTopology("config must be an object with a 'mode' field")
        mode = TopologyMode(doc.pop("mode"))
        if mode is TopologyMode.OS_QUERY:
            return cls(mode=mode)
        spec = deserialize_topology(json.dumps(doc, separators=(",", ":")).encode("utf-8"))
        return cls(mode=mode, synthetic_spec=spec)


def _query_logical_cores() -> int:
    count = os.cpu_count()
    if count is None:
        raise OSError("cpu count unavailable")
    return count


def _query_total_memory() -> int:
    page = os.sysconf("SC_PAGE_SIZE")
    pages = os.sysconf("SC_PHYS_PAGES")
    if page <= 0 or pages <= 0:
        raise OSError("physical memory size unavailable")
    return page * pages


class HostTopologyManager(TopologyManager):
    """Reports one host device with its logical cores and physical memory.

    In OS-query mode the result carries one memory space sized to total
    physical memory and one compute resource per logical core, each hinted
    to its core index.  When the OS query is unavailable the manager falls
    back to 1 core / 1 GiB and marks the returned topology ``degraded``.
    """

    def __init__(self, config: HostTopologyConfig | None = None) -> None:
        self._config = config or HostTopologyConfig()

    def query_topology(self) -> Topology:
        if self._config.mode is TopologyMode.SYNTHETIC:
            assert self._config.synthetic_spec is not None
            return self._config.synthetic_spec
        degraded = False
        try:
            cores = _query_logical_cores()
        except (OSError, ValueError):
            cores, degraded = _FALLBACK_CORES, True
        try:
            memory = _query_total_memory()
        except (OSError, ValueError):
            memory, degraded = _FALLBACK_MEMORY, True
        device = Device(
            device_id=0,
            kind="numa-domain",
            memory_spaces=(MemorySpace(space_id=0, size_bytes=memory, kind="host-ram"),),
            compute_resources=tuple(
                ComputeResource(resource_id=i, kind="cpu-core", affinity=i) for i in range(cores)
            ),
        )
        return Topology(devices=(device,), degraded=degraded)
