"""Instances, instance templates, and the abstract instance manager contract.

An instance is an independently executing participant of a deployment,
typically an OS process, with resources disjoint from every other instance.
Exactly one instance per deployment is the root: the tie-breaking designee
for collective coordination.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum

from hicr.topology import Topology

# Instance identifiers are 64-bit unsigned integers, unique across all live
# instances of one deployment and stable for the instance's lifetime.
InstanceId = int


class InstanceState(Enum):
    ACTIVE = "active"
    FINALIZED = "finalized"


@dataclass(frozen=True)
class Instance:
    id: InstanceId
    is_root: bool
    state: InstanceState = InstanceState.ACTIVE


@dataclass
class InstanceTemplate:
    """Minimum hardware requirements plus free-form metadata for new instances.

    An empty required topology imposes no requirements.
    """

    required_topology: Topology = field(default_factory=Topology)
    metadata: dict[str, str] = field(default_factory=dict)


def _spaces_satisfiable(required, actual) -> bool:
    # Greedy match by descending size; a required space may be served by any
    # actual space of at least its size (kinds are hints, not constraints).
    avail = sorted((sp.size_bytes for sp in actual), reverse=True)
    for need in sorted((sp.size_bytes for sp in required), reverse=True):
        for i, have in enumerate(avail):
            if have >= need:
                del avail[i]
                break
        else:
            return False
    return True


def topology_satisfies(actual: Topology, required: Topology) -> bool:
    """Whether ``actual`` provides at least the resources ``required`` asks for.

    Each required device must be served by a distinct actual device of the
    same kind (an empty required kind matches any), with at least as many
    compute resources and memory spaces covering the required sizes.
    """
    remaining = list(actual.devices)
    for need in required.devices:
        for i, have in enumerate(remaining):
            if need.kind and have.kind != need.kind:
                continue
            if len(have.compute_resources) < len(need.compute_resources):
                continue
            if not _spaces_satisfiable(need.memory_spaces, have.memory_spaces):
                continue
            del remaining[i]
            break
        else:
            return False
    return True


class InstanceManager(ABC):
    """Detection of existing instances and creation of new ones at runtime."""

    @abstractmethod
    def get_instances(self) -> list[Instance]:
        """All launch-time and runtime-created instances known so far.

        The current instance always appears in the list; exactly one entry
        reports ``is_root``.
        """

    @abstractmethod
    def get_current_instance(self) -> Instance:
        """The instance this code is running in."""

    @abstractmethod
    def create_instances(self, n: int, template: InstanceTemplate) -> list[Instance]:
        """Create ``n >= 1`` new non-root instances satisfying ``template``.

        Raises :class:`~hicr.errors.TemplateUnsatisfiable` when obtainable
        hardware cannot meet the required topology and
        :class:`~hicr.errors.SpawnFailure` on process-level failure.
        """
