"""Exception types raised across the emulator.

Every error carries enough context in its message to identify the offending
object; tests match on the exception type, not the text.
"""


class EmulatorError(Exception):
    """Base class for all emulator errors."""


# composition and rendering

class DuplicateLayer(EmulatorError):
    pass


class UnknownLayer(EmulatorError):
    pass


class AlreadyRendered(EmulatorError):
    pass


class NotRendered(EmulatorError):
    pass


class CyclicLayerDependency(EmulatorError):
    pass


# bindings

class DuplicateBinding(EmulatorError):
    pass


class UnboundVirtualNode(EmulatorError):
    pass


class NoMatchingCandidate(EmulatorError):
    pass


class BindCollision(EmulatorError):
    pass


# component export / import

class VersionMismatch(EmulatorError):
    pass


class MalformedComponent(EmulatorError):
    pass


# base layer

class DuplicateId(EmulatorError):
    pass


class DuplicateName(EmulatorError):
    pass


class UnknownNetwork(EmulatorError):
    pass


class UnknownNode(EmulatorError):
    pass


class PrefixOverlap(EmulatorError):
    pass


class ExplicitPrefixRequired(EmulatorError):
    pass


class ExplicitAddressRequired(EmulatorError):
    pass


class AddressInUse(EmulatorError):
    pass


class AddressOutOfPrefix(EmulatorError):
    pass


class PoolExhausted(EmulatorError):
    pass


class RelativePath(EmulatorError):
    pass


class EmptyPrefixSource(EmulatorError):
    pass


class PortInUse(EmulatorError):
    pass


class IxNetworkNotAllowed(EmulatorError):
    pass


# routing

class NotAtExchange(EmulatorError):
    pass


class DuplicateSession(EmulatorError):
    pass


# dns

class MalformedFqdn(EmulatorError):
    pass


class UnparseableRecord(EmulatorError):
    pass


class SecondMaster(EmulatorError):
    pass


class OrphanZone(EmulatorError):
    pass


class UnboundNameserver(EmulatorError):
    pass


# analysis

class UnknownPrefix(EmulatorError):
    pass


# map backend

class MissingLabels(EmulatorError):
    pass


class FilterRejected(EmulatorError):
    pass


class UnknownRecording(EmulatorError):
    pass


class OfflineMode(EmulatorError):
    pass


class NodeNotRunning(EmulatorError):
    pass


class SourceUnavailable(EmulatorError):
    pass
