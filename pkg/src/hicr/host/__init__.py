"""Intra-process backend: OS-queried topology, heap memory, direct-copy
communication, and thread- and coroutine-based compute managers."""

from hicr.host.communication import HostCommunicationManager
from hicr.host.coroutines import CoroutineComputeManager, CoroutineExecutionUnit
from hicr.host.instance import LocalInstanceManager
from hicr.host.memory import HostMemoryManager
from hicr.host.threads import ThreadComputeManager, ThreadExecutionUnit
from hicr.host.topology import HostTopologyConfig, HostTopologyManager

__all__ = [
    "HostCommunicationManager",
    "HostMemoryManager",
    "HostTopologyConfig",
    "HostTopologyManager",
    "LocalInstanceManager",
    "ThreadComputeManager",
    "ThreadExecutionUnit",
    "CoroutineComputeManager",
    "CoroutineExecutionUnit",
]
