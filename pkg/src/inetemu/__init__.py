"""Internet emulation toolkit: compose, render, compile, analyze, visualize."""

from .analysis import (
    ControlPlaneModel,
    PathDiff,
    RibEntry,
    Ribs,
    Route,
    computeRibs,
    tracePath,
    whatIfAnnounce,
)
from .base import (
    AutonomousSystem,
    Base,
    InternetExchange,
    Network,
    Node,
    RemoteAccess,
)
from .compilers import (
    ContainerSpec,
    buildManifest,
    compileContainers,
    compileGraph,
    containerName,
)
from .core import (
    COMPONENT_VERSION,
    Action,
    Binding,
    Emulator,
    Filter,
    Layer,
    NodeRole,
    Registry,
    RenderedEmulation,
    VirtualNode,
    registerLayerType,
)
from .dns import DomainNameService, Zone
from .errors import EmulatorError
from .routing import Ebgp, IbgpMesh, PeerRelationship, Routing, buildIbgpMesh

__all__ = [
    "Action",
    "AutonomousSystem",
    "Base",
    "Binding",
    "COMPONENT_VERSION",
    "ContainerSpec",
    "ControlPlaneModel",
    "DomainNameService",
    "Ebgp",
    "Emulator",
    "EmulatorError",
    "Filter",
    "IbgpMesh",
    "InternetExchange",
    "Layer",
    "Network",
    "Node",
    "NodeRole",
    "PathDiff",
    "PeerRelationship",
    "Registry",
    "RemoteAccess",
    "RenderedEmulation",
    "RibEntry",
    "Ribs",
    "Route",
    "Routing",
    "VirtualNode",
    "Zone",
    "buildIbgpMesh",
    "buildManifest",
    "compileContainers",
    "compileGraph",
    "computeRibs",
    "containerName",
    "registerLayerType",
    "tracePath",
    "whatIfAnnounce",
]

__version__ = "0.1.0"
