"""Exception hierarchy shared by the core contracts, backends, and frontends."""

from __future__ import annotations


class HicrError(Exception):
    """Base class for all errors raised by this library."""


# -- core model rules ---------------------------------------------------------

class IllegalDirection(HicrError):
    """A memcpy pairing that the model forbids (global source and global destination)."""


class OutOfBounds(HicrError):
    """A byte range does not fit inside the slot it addresses."""


class InvalidSlot(HicrError):
    """Operation on a slot that has been freed or was never valid."""


class SlotPinned(HicrError):
    """The slot backs a published data object and cannot be freed yet."""


class IllegalTransition(HicrError):
    """An execution-state lifecycle transition outside the legal set."""


class WrongLifecycle(HicrError):
    """A manager call that requires a different processing-unit or state lifecycle."""


class MalformedTopology(HicrError):
    """Bytes that do not decode into a valid topology."""


# -- manager contracts --------------------------------------------------------

class DiscoveryFailure(HicrError):
    """Topology discovery could not query the underlying system."""


class UnknownMemorySpace(HicrError):
    """The memory space was not produced by (or registered with) this manager."""


class OutOfMemory(HicrError):
    """The memory space's tracked capacity would be exceeded."""


class UnsupportedSpacePair(HicrError):
    """The communication manager cannot move data between these slots."""


class FenceTimeout(HicrError):
    """A fence did not complete within its configured timeout."""


class DuplicateKey(HicrError):
    """Two contributions under one exchange tag used the same key."""


class CollectiveMismatch(HicrError):
    """A collective operation never completed because a participant did not arrive."""


class NotFound(HicrError):
    """No global slot is known under the requested (tag, key)."""


class UnsupportedResource(HicrError):
    """The compute manager does not accept this compute resource."""


class UnsupportedUnitKind(HicrError):
    """The compute manager does not accept execution units of this kind."""


class TemplateUnsatisfiable(HicrError):
    """No obtainable instance can satisfy the template's required topology."""


class SpawnFailure(HicrError):
    """Creating a new instance failed at the process level."""


# -- net backend --------------------------------------------------------------

class BootstrapTimeout(HicrError):
    """The deployment did not assemble within the bootstrap timeout."""


class MissingEnvironment(HicrError):
    """Required launcher environment variables are absent."""


class PeerUnreachable(HicrError):
    """A peer instance could not be contacted or stopped responding."""


# -- channels -----------------------------------------------------------------

class ConfigMismatch(HicrError):
    """Channel endpoints were created with differing configurations."""


class WrongRole(HicrError):
    """Operation invoked on a channel endpoint with the wrong role."""


class SizeMismatch(HicrError):
    """A buffer size does not match what the operation requires."""


class Empty(HicrError):
    """Pop on a channel that holds no message."""


# -- data objects -------------------------------------------------------------

class UnknownObject(HicrError):
    """No published data object exists under this identifier."""


# -- rpc ----------------------------------------------------------------------

class DuplicateName(HicrError):
    """A function with this name is already registered."""


class HashCollision(HicrError):
    """A different name already occupies this name-hash."""


class RpcUnknownName(HicrError):
    """The target instance has no function registered under the requested name."""


class RpcTimeout(HicrError):
    """No reply arrived within the configured request timeout."""


# -- tasking ------------------------------------------------------------------

class AlreadyStarted(HicrError):
    """The task runtime is already running."""


class NotStarted(HicrError):
    """The task runtime has not been started."""


# -- bench --------------------------------------------------------------------

class MeshMismatch(HicrError):
    """Grid, thread-mesh, and node-mesh dimensions are inconsistent."""


class VerificationFailure(HicrError):
    """A benchmark's built-in payload verification failed."""


class IoFailure(HicrError):
    """Writing an output artifact failed."""
