"""Single-process instance manager: one root instance, no spawning."""

from __future__ import annotations

from hicr.errors import SpawnFailure
from hicr.instance import Instance, InstanceManager, InstanceTemplate


class LocalInstanceManager(InstanceManager):
    """The degenerate deployment of one instance, which is therefore root."""

    def __init__(self, instance_id: int = 0) -> None:
        self._self = Instance(id=instance_id, is_root=True)

    def get_instances(self) -> list[Instance]:
        return [self._self]

    def get_current_instance(self) -> Instance:
        return self._self

    def create_instances(self, n: int, template: InstanceTemplate) -> list[Instance]:
        raise SpawnFailure("the intra-process backend cannot create new instances")
