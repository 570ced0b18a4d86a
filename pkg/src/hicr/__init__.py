"""Portable runtime support layer.

Core contracts (topology, memory, communication, compute, instances) live in
the top-level modules; ``hicr.host`` and ``hicr.net`` provide interchangeable
backends; ``hicr.channels``, ``hicr.dataobject``, ``hicr.rpc`` and
``hicr.tasking`` are frontends built purely on the core contracts.
"""

from hicr import errors
from hicr.communication import (
    CommunicationManager,
    MemcpyDirection,
    TransferHandle,
    classify_memcpy,
)
from hicr.execution import (
    ComputeManager,
    ExecutionState,
    ExecutionUnit,
    ProcessingUnit,
    PuLifecycle,
    StateLifecycle,
    run_to_completion,
    transition_execution_state,
    transition_processing_unit,
)
from hicr.instance import (
    Instance,
    InstanceId,
    InstanceManager,
    InstanceState,
    InstanceTemplate,
    topology_satisfies,
)
from hicr.memory import (
    GlobalMemorySlot,
    LocalMemorySlot,
    MemoryManager,
    SlotOrigin,
    validate_slot_range,
)
from hicr.topology import (
    ComputeResource,
    Device,
    MemorySpace,
    Topology,
    TopologyManager,
    deserialize_topology,
    serialize_topology,
)

__all__ = [
    "errors",
    "classify_memcpy",
    "CommunicationManager",
    "MemcpyDirection",
    "TransferHandle",
    "ComputeManager",
    "ExecutionState",
    "ExecutionUnit",
    "ProcessingUnit",
    "PuLifecycle",
    "StateLifecycle",
    "run_to_completion",
    "transition_execution_state",
    "transition_processing_unit",
    "Instance",
    "InstanceId",
    "InstanceManager",
    "InstanceState",
    "InstanceTemplate",
    "topology_satisfies",
    "GlobalMemorySlot",
    "LocalMemorySlot",
    "MemoryManager",
    "SlotOrigin",
    "validate_slot_range",
    "ComputeResource",
    "Device",
    "MemorySpace",
    "Topology",
    "TopologyManager",
    "deserialize_topology",
    "serialize_topology",
]

__version__ = "0.1.0"
