"""Core composition model.

An emulation is composed from layers, rendered once into a frozen registry of
physical objects, then handed to a compiler or analyzer.  Service layers talk
about nodes only through virtual-node names; bindings resolve those names to
physical hosts at render time.
"""

from __future__ import annotations

import enum
import fnmatch
import json
import random
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import (
    AlreadyRendered,
    BindCollision,
    CyclicLayerDependency,
    DuplicateBinding,
    DuplicateLayer,
    EmulatorError,
    MalformedComponent,
    NoMatchingCandidate,
    RelativePath,
    UnboundVirtualNode,
    UnknownLayer,
    VersionMismatch,
)

COMPONENT_VERSION = 1


class NodeRole(enum.Enum):
    HOST = "host"
    ROUTER = "router"
    ROUTE_SERVER = "routeServer"
    REAL_WORLD_ROUTER = "realWorldRouter"


class Action(enum.Enum):
    """How a binding picks among candidate hosts."""

    FIRST = "first"
    RANDOM = "random"
    NEW = "new"


@dataclass
class FileSpec:
    """A file staged onto a node: either inline content or a host path."""

    path: str
    content: Optional[str] = None
    hostPath: Optional[str] = None

    def describe(self) -> dict:
        return {"path": self.path, "content": self.content, "hostPath": self.hostPath}


class Customizable:
    """Mixin recording software, files and commands onto a node.

    All recorded items are emitted verbatim into the node's build recipe and
    start script at compile time; nothing is interpreted here.
    """

    def __init__(self):
        self._software: list[str] = []
        self._files: list[FileSpec] = []
        self._buildCommands: list[str] = []
        self._startCommands: list[str] = []
        self.displayName: Optional[str] = None
        self.description: Optional[str] = None

    def _assertMutable(self):
        pass

    def addSoftware(self, name: str):
        self._assertMutable()
        if name not in self._software:
            self._software.append(name)
        return self

    def setFile(self, content: str, path: str):
        """Place inline content at an absolute path on the node."""
        self._assertMutable()
        if not path.startswith("/"):
            raise RelativePath(f"node path must be absolute: {path!r}")
        self._files = [f for f in self._files if f.path != path]
        self._files.append(FileSpec(path=path, content=content))
        return self

    def importFile(self, hostpath: str, nodepath: str):
        """Copy a file from the build host onto the node at compile time."""
        self._assertMutable()
        if not nodepath.startswith("/"):
            raise RelativePath(f"node path must be absolute: {nodepath!r}")
        self._files = [f for f in self._files if f.path != nodepath]
        self._files.append(FileSpec(path=nodepath, hostPath=hostpath))
        return self

    def addBuildCommand(self, cmd: str):
        self._assertMutable()
        self._buildCommands.append(cmd)
        return self

    def appendStartCommand(self, cmd: str):
        self._assertMutable()
        self._startCommands.append(cmd)
        return self

    def setDisplayName(self, name: str):
        self._assertMutable()
        self.displayName = name
        return self

    def setDescription(self, text: str):
        self._assertMutable()
        self.description = text
        return self

    def getSoftware(self) -> list[str]:
        return list(self._software)

    def getFiles(self) -> list[FileSpec]:
        return list(self._files)

    def getBuildCommands(self) -> list[str]:
        return list(self._buildCommands)

    def getStartCommands(self) -> list[str]:
        return list(self._startCommands)

    def _mergeFrom(self, other: "Customizable"):
        for s in other._software:
            if s not in self._software:
                self._software.append(s)
        for f in other._files:
            self._files = [x for x in self._files if x.path != f.path]
            self._files.append(FileSpec(f.path, f.content, f.hostPath))
        self._buildCommands.extend(other._buildCommands)
        self._startCommands.extend(other._startCommands)
        if other.displayName is not None:
            self.displayName = other.displayName
        if other.description is not None:
            self.description = other.description


class VirtualNode(Customizable):
    """A named placeholder a service layer configures before binding."""

    def __init__(self, name: str):
        super().__init__()
        self.name = name


@dataclass
class Filter:
    """Candidate predicate for a binding.

    nodeName is an anchored glob; ip matches any interface address; asn pins
    the autonomous system.  allowReuse permits landing on a node another
    binding already claimed.
    """

    asn: Optional[int] = None
    nodeName: Optional[str] = None
    ip: Optional[str] = None
    allowReuse: bool = False

    def matches(self, node) -> bool:
        if self.asn is not None and node.asn != self.asn:
            return False
        if self.nodeName is not None and not fnmatch.fnmatchcase(node.name, self.nodeName):
            return False
        if self.ip is not None and self.ip not in [a for _, a in node.getInterfaces()]:
            return False
        return True


@dataclass
class Binding:
    vnodeName: str
    filter: Filter = field(default_factory=Filter)
    action: Action = Action.FIRST


class Registry:
    """Flat object store keyed by (scope, kind, name).

    Scope is an ASN in decimal text, "ix" for exchange-level objects, or
    "global".  The registry freezes after render.
    """

    def __init__(self):
        self._store: dict[tuple[str, str, str], object] = {}
        self._frozen = False

    def register(self, scope: str, kind: str, name: str, obj) -> object:
        if self._frozen:
            raise AlreadyRendered("registry is frozen")
        key = (scope, kind, name)
        if key in self._store:
            raise EmulatorError(f"registry key already present: {key}")
        self._store[key] = obj
        return obj

    def has(self, scope: str, kind: str, name: str) -> bool:
        return (scope, kind, name) in self._store

    def get(self, scope: str, kind: str, name: str):
        key = (scope, kind, name)
        if key not in self._store:
            raise EmulatorError(f"no such registry entry: {key}")
        return self._store[key]

    def byKind(self, kind: str) -> list[tuple[tuple[str, str, str], object]]:
        out = [(k, v) for k, v in self._store.items() if k[1] == kind]
        out.sort(key=lambda kv: kv[0])
        return out

    def items(self) -> list[tuple[tuple[str, str, str], object]]:
        return sorted(self._store.items(), key=lambda kv: kv[0])

    def freeze(self):
        self._frozen = True

    @property
    def frozen(self) -> bool:
        return self._frozen


class Layer:
    """A composable unit of emulation behavior.

    kind "base" layers materialize physical objects; kind "service" layers
    reference nodes only through virtual-node names and can be exported as
    reusable components.
    """

    name: str = "layer"
    kind: str = "service"
    rank: int = 30

    def __init__(self):
        self.dependsOn: set[str] = set()
        self._frozen = False

    def _assertMutable(self):
        if self._frozen:
            raise AlreadyRendered(f"layer {self.name} is frozen after render")

    def addDependency(self, layerName: str):
        self._assertMutable()
        self.dependsOn.add(layerName)
        return self

    # render hooks, called in layer order
    def configure(self, ctx: "RenderContext"):
        pass

    def render(self, ctx: "RenderContext"):
        pass

    def finalize(self, ctx: "RenderContext"):
        pass

    def getVirtualNodes(self) -> dict[str, VirtualNode]:
        return {}

    # component round trip; service layers that support export implement both
    def describe(self) -> dict:
        raise UnknownLayer(f"layer {self.name} cannot be exported")

    @classmethod
    def restore(cls, doc: dict) -> "Layer":
        raise MalformedComponent(f"layer type {doc.get('type')!r} cannot be imported")


LAYER_TYPES: dict[str, type] = {}


def registerLayerType(typeName: str, cls: type):
    LAYER_TYPES[typeName] = cls


class RenderContext:
    def __init__(self, emulator: "Emulator"):
        self.emulator = emulator
        self.registry = emulator.registry
        self.rng = random.Random(emulator.rngSeed)
        self.resolvedBindings: dict[str, object] = {}
        self.renderCounter = emulator._renderCount


def _sanitizeNodeName(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "-", name)


class Emulator:
    """Holds layers and bindings; render() produces the frozen emulation."""

    def __init__(self, seed: int = 0):
        self.rngSeed = seed
        self.registry = Registry()
        self.rendered = False
        self._layers: dict[str, Layer] = {}
        self._bindings: list[Binding] = []
        self._renderCount = 0

    def _assertMutable(self):
        if self.rendered:
            raise AlreadyRendered("emulator has been rendered")

    def setSeed(self, seed: int):
        self._assertMutable()
        self.rngSeed = seed
        return self

    def addLayer(self, layer: Layer) -> Layer:
        self._assertMutable()
        if layer.name in self._layers:
            raise DuplicateLayer(f"layer {layer.name} already added")
        self._layers[layer.name] = layer
        return layer

    def removeLayer(self, name: str) -> Layer:
        self._assertMutable()
        if name not in self._layers:
            raise UnknownLayer(f"no layer named {name}")
        return self._layers.pop(name)

    def getLayer(self, name: str) -> Layer:
        if name not in self._layers:
            raise UnknownLayer(f"no layer named {name}")
        return self._layers[name]

    def hasLayer(self, name: str) -> bool:
        return name in self._layers

    def getLayers(self) -> list[Layer]:
        return list(self._layers.values())

    def addBinding(self, binding: Binding):
        self._assertMutable()
        if any(b.vnodeName == binding.vnodeName for b in self._bindings):
            raise DuplicateBinding(f"virtual node {binding.vnodeName} bound twice")
        self._bindings.append(binding)
        return self

    def _layerOrder(self) -> list[Layer]:
        """Topological order honoring explicit dependsOn, tie-broken by
        (rank, insertion) so base < routing < ebgp < services."""
        insertion = {name: i for i, name in enumerate(self._layers)}
        pending: dict[str, set[str]] = {}
        for name, layer in self._layers.items():
            for dep in layer.dependsOn:
                if dep not in self._layers:
                    raise UnknownLayer(f"layer {name} depends on missing layer {dep}")
            pending[name] = set(layer.dependsOn)
        order: list[Layer] = []
        while pending:
            ready = [n for n, deps in pending.items() if not deps]
            if not ready:
                raise CyclicLayerDependency(f"among layers: {sorted(pending)}")
            ready.sort(key=lambda n: (self._layers[n].rank, insertion[n]))
            chosen = ready[0]
            order.append(self._layers[chosen])
            del pending[chosen]
            for deps in pending.values():
                deps.discard(chosen)
        return order

    def _resolveBindings(self, ctx: RenderContext, order: list[Layer]):
        vnodes: dict[str, VirtualNode] = {}
        for layer in order:
            for vname, vnode in layer.getVirtualNodes().items():
                vnodes.setdefault(vname, vnode)

        bindingByName = {b.vnodeName: b for b in self._bindings}
        claims: dict[int, Binding] = {}

        for vname, vnode in vnodes.items():
            if vname not in bindingByName:
                raise UnboundVirtualNode(f"no binding for virtual node {vname}")
            binding = bindingByName[vname]
            node = self._selectNode(ctx, binding, claims)
            claims[id(node)] = binding
            node._mergeFrom(vnode)
            ctx.resolvedBindings[vname] = node

    def _selectNode(self, ctx: RenderContext, binding: Binding, claims: dict):
        flt = binding.filter
        if binding.action is Action.NEW:
            return self._createBoundHost(ctx, binding)

        candidates = [
            node
            for _, node in ctx.registry.byKind("node")
            if node.role is NodeRole.HOST and flt.matches(node)
        ]
        candidates.sort(key=lambda n: (n.asn, n.name))
        if not flt.allowReuse:
            candidates = [n for n in candidates if id(n) not in claims]
        if not candidates:
            raise NoMatchingCandidate(
                f"no host matches binding for {binding.vnodeName} ({flt})"
            )
        if binding.action is Action.RANDOM:
            node = candidates[ctx.rng.randrange(len(candidates))]
        else:
            node = candidates[0]
        prior = claims.get(id(node))
        if prior is not None and (not prior.filter.allowReuse or not flt.allowReuse):
            raise BindCollision(
                f"{binding.vnodeName} and {prior.vnodeName} both selected node {node.name}"
            )
        return node

    def _createBoundHost(self, ctx: RenderContext, binding: Binding):
        flt = binding.filter
        if flt.asn is None:
            raise NoMatchingCandidate(
                f"action NEW for {binding.vnodeName} needs a filter with an asn"
            )
        base = self.getLayer("base")
        asys = base.getAutonomousSystem(flt.asn)
        nets = asys.getNetworks()
        if not nets:
            raise NoMatchingCandidate(f"AS {flt.asn} has no network for a new host")
        name = _sanitizeNodeName(binding.vnodeName)
        existing = {n.name for n in asys.getNodes()}
        candidate, i = name, 0
        while candidate in existing:
            candidate = f"{name}-{i}"
            i += 1
        host = asys.createHost(candidate)
        host.joinNetwork(nets[0].name)
        base._registerNode(ctx.registry, asys, host)
        return host

    def render(self) -> "RenderedEmulation":
        self._assertMutable()
        self._renderCount += 1
        ctx = RenderContext(self)
        order = self._layerOrder()
        for layer in order:
            layer.configure(ctx)
        self._resolveBindings(ctx, order)
        for layer in order:
            layer.render(ctx)
        for layer in order:
            layer.finalize(ctx)
        for key, node in self.registry.byKind("node"):
            if not node.getInterfaces():
                raise EmulatorError(f"node {key} has no interface after render")
        for layer in order:
            layer._frozen = True
        self.registry.freeze()
        self.rendered = True
        return RenderedEmulation(self, order, ctx)

    # component io

    def exportComponent(self, layerNames, path: Optional[str] = None) -> dict:
        layers = []
        vnames: set[str] = set()
        for name in layerNames:
            layer = self.getLayer(name)
            if layer.kind != "service":
                raise UnknownLayer(f"layer {name} is not a service layer")
            layers.append(layer.describe())
            vnames.update(layer.getVirtualNodes().keys())
        doc = {
            "componentVersion": COMPONENT_VERSION,
            "layers": layers,
            "virtualNodes": sorted(vnames),
        }
        if path is not None:
            with open(path, "w") as f:
                json.dump(doc, f, indent=2, sort_keys=True)
        return doc


def importComponent(source) -> list[Layer]:
    """Load layers from a component document (path, JSON text, or dict)."""
    if isinstance(source, dict):
        doc = source
    else:
        text = source
        if "\n" not in source and not source.lstrip().startswith("{"):
            with open(source) as f:
                text = f.read()
        try:
            doc = json.loads(text)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise MalformedComponent(str(e)) from e
    if not isinstance(doc, dict):
        raise MalformedComponent("component document must be an object")
    if "componentVersion" not in doc:
        raise MalformedComponent("missing componentVersion")
    if doc["componentVersion"] != COMPONENT_VERSION:
        raise VersionMismatch(f"unsupported componentVersion {doc['componentVersion']!r}")
    if "layers" not in doc or not isinstance(doc["layers"], list):
        raise MalformedComponent("missing layers list")
    out = []
    for layerDoc in doc["layers"]:
        if not isinstance(layerDoc, dict) or "type" not in layerDoc:
            raise MalformedComponent("layer entry missing type")
        typeName = layerDoc["type"]
        if typeName not in LAYER_TYPES:
            raise UnknownLayer(f"unknown layer type {typeName!r}")
        out.append(LAYER_TYPES[typeName].restore(layerDoc))
    return out


class RenderedEmulation:
    """Frozen result of Emulator.render()."""

    def __init__(self, emulator: Emulator, order: list[Layer], ctx: RenderContext):
        self.emulator = emulator
        self.registry = emulator.registry
        self.seed = emulator.rngSeed
        self.layers = order
        self.resolvedBindings = dict(ctx.resolvedBindings)

    def getNodes(self) -> list:
        return [node for _, node in self.registry.byKind("node")]

    def getNetworks(self) -> list:
        return [net for _, net in self.registry.byKind("network")]

    def getNode(self, scope: str, name: str):
        return self.registry.get(str(scope), "node", name)

    def getLayer(self, name: str) -> Layer:
        return self.emulator.getLayer(name)

    def hasLayer(self, name: str) -> bool:
        return self.emulator.hasLayer(name)

    def ebgpSessions(self) -> list:
        if self.hasLayer("ebgp"):
            return list(self.getLayer("ebgp").getSessions())
        return []

    def ibgpMeshes(self) -> dict:
        if self.hasLayer("routing"):
            return dict(self.getLayer("routing").getMeshes())
        return {}

    def boundNode(self, vnodeName: str):
        if vnodeName not in self.resolvedBindings:
            raise UnboundVirtualNode(f"no binding resolved for {vnodeName!r}")
        return self.resolvedBindings[vnodeName]

    def serializeRegistry(self) -> bytes:
        doc = {}
        for (scope, kind, name), obj in self.registry.items():
            doc[f"{scope}/{kind}/{name}"] = obj.describe()
        return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
