"""Base layer: exchanges, autonomous systems, networks and nodes.

Addressing conventions (load-bearing for golden tests):
  exchange ix{id}     -> 10.{id}.0.0/24, routers join at .{asn}
  AS internal net k   -> 10.{asn}.{k}.0/24
  internal routers    -> .254 and descending
  internal hosts      -> .71 and ascending
Identifiers above 254/255 require explicit addresses or prefixes.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .core import Customizable, Layer, NodeRole, RenderContext
from .errors import (
    AddressInUse,
    AddressOutOfPrefix,
    DuplicateId,
    DuplicateName,
    EmptyPrefixSource,
    EmulatorError,
    ExplicitAddressRequired,
    ExplicitPrefixRequired,
    IxNetworkNotAllowed,
    PoolExhausted,
    PortInUse,
    PrefixOverlap,
    UnknownNetwork,
    UnknownNode,
)

HOST_POOL_START = 71
ROUTER_POOL_START = 254


@dataclass
class RemoteAccess:
    """Remote access service attached to an internal network."""

    exposedPort: int
    serviceKind: str = "vpn"


class Network:
    def __init__(self, base: "Base", scope: str, name: str, prefix: ipaddress.IPv4Network):
        self._base = base
        self.scope = scope
        self.name = name
        self.prefix = prefix
        self.addresses: dict[str, "Node"] = {}
        self.remoteAccess: Optional[RemoteAccess] = None

    @property
    def isExchange(self) -> bool:
        return self.scope == "ix"

    def enableRemoteAccess(self, spec: RemoteAccess):
        self._base._assertMutable()
        if self.isExchange:
            raise IxNetworkNotAllowed(f"remote access not allowed on {self.name}")
        if spec.exposedPort in self._base._usedPorts:
            raise PortInUse(f"host port {spec.exposedPort} already published")
        self._base._usedPorts.add(spec.exposedPort)
        self.remoteAccess = spec
        return self

    def _claim(self, address: str, node: "Node") -> str:
        addr = ipaddress.ip_address(address)
        if addr not in self.prefix:
            raise AddressOutOfPrefix(f"{address} not in {self.prefix} ({self.name})")
        if address in self.addresses:
            raise AddressInUse(f"{address} already used on {self.name}")
        self.addresses[address] = node
        return address

    def _fromPool(self, node: "Node", descending: bool) -> str:
        netInt = int(self.prefix.network_address)
        topInt = int(self.prefix.broadcast_address)
        if descending:
            cur = min(netInt + ROUTER_POOL_START, topInt - 1)
            while cur > netInt and str(ipaddress.ip_address(cur)) in self.addresses:
                cur -= 1
            if cur <= netInt:
                raise PoolExhausted(f"router pool exhausted on {self.name}")
        else:
            cur = netInt + HOST_POOL_START
            if cur >= topInt:
                cur = netInt + 1  # prefix too small for the usual offset
            while cur < topInt and str(ipaddress.ip_address(cur)) in self.addresses:
                cur += 1
            if cur >= topInt:
                raise PoolExhausted(f"host pool exhausted on {self.name}")
        address = str(ipaddress.ip_address(cur))
        self.addresses[address] = node
        return address

    def assign(self, node: "Node", address: Union[str, None] = "auto") -> str:
        if address is not None and address != "auto":
            return self._claim(address, node)
        if self.isExchange:
            if node.role is NodeRole.ROUTE_SERVER:
                return self._fromPool(node, descending=True)
            if 2 <= node.asn <= 254:
                return self._claim(str(self.prefix.network_address + node.asn), node)
            raise ExplicitAddressRequired(
                f"ASN {node.asn} exceeds the {self.name} auto pool; pass an address"
            )
        if node.role is NodeRole.HOST:
            return self._fromPool(node, descending=False)
        return self._fromPool(node, descending=True)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "scope": self.scope,
            "prefix": str(self.prefix),
            "remoteAccess": (
                {"serviceKind": self.remoteAccess.serviceKind, "exposedPort": self.remoteAccess.exposedPort}
                if self.remoteAccess
                else None
            ),
        }


@dataclass
class Interface:
    net: Network
    address: str


class Node(Customizable):
    """A machine in the emulation; compiles to one container."""

    def __init__(self, base: "Base", asys: Optional["AutonomousSystem"], name: str, asn: int, role: NodeRole):
        super().__init__()
        self._base = base
        self._asys = asys
        self.name = name
        self.asn = asn
        self.role = role
        self.interfaces: list[Interface] = []
        self.loopback: Optional[str] = None
        self.rwStaticPrefixes: Optional[list[str]] = None
        self.rwPrefixes: list[str] = []

    def _assertMutable(self):
        self._base._assertMutable()

    def joinNetwork(self, name: str, address: Union[str, None] = "auto"):
        """Attach this node to a named network; chainable."""
        self._assertMutable()
        net = self._resolveNetwork(name)
        if net.isExchange and self.role is NodeRole.HOST:
            raise IxNetworkNotAllowed(f"host {self.name} cannot join exchange {name}")
        addr = net.assign(self, address)
        self.interfaces.append(Interface(net, addr))
        return self

    def _resolveNetwork(self, name: str) -> Network:
        if self._asys is not None and name in self._asys._networks:
            return self._asys._networks[name]
        ixNet = self._base._ixNetworks.get(name)
        if ixNet is not None:
            return ixNet
        raise UnknownNetwork(f"no network named {name} visible from {self.name}")

    def getInterfaces(self) -> list[tuple[Network, str]]:
        return [(i.net, i.address) for i in self.interfaces]

    def addressOn(self, netName: str) -> Optional[str]:
        for i in self.interfaces:
            if i.net.name == netName:
                return i.address
        return None

    @property
    def isBgpRouter(self) -> bool:
        if self.role is NodeRole.HOST:
            return False
        return any(i.net.isExchange for i in self.interfaces)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "asn": self.asn,
            "role": self.role.value,
            "interfaces": [[i.net.name, i.address] for i in self.interfaces],
            "loopback": self.loopback,
            "software": sorted(self._software),
            "files": [f.describe() for f in sorted(self._files, key=lambda f: f.path)],
            "buildCommands": list(self._buildCommands),
            "startCommands": list(self._startCommands),
            "displayName": self.displayName,
            "description": self.description,
            "rwPrefixes": list(self.rwPrefixes),
        }


class AutonomousSystem:
    def __init__(self, base: "Base", asn: int):
        self._base = base
        self.asn = asn
        self._networks: dict[str, Network] = {}
        self._nodes: dict[str, Node] = {}
        self._netOrder: list[str] = []

    def createNetwork(self, name: str, prefix: Optional[str] = None) -> Network:
        self._base._assertMutable()
        if name in self._networks:
            raise DuplicateName(f"AS {self.asn} already has a network {name}")
        if name.startswith("ix"):
            raise DuplicateName(f"network names starting with 'ix' are reserved: {name}")
        if prefix is None:
            if self.asn > 255:
                raise ExplicitPrefixRequired(
                    f"ASN {self.asn} exceeds the auto prefix range; pass a prefix"
                )
            k = len(self._netOrder)
            prefix = f"10.{self.asn}.{k}.0/24"
        net = Network(self._base, str(self.asn), name, ipaddress.ip_network(prefix))
        self._base._checkOverlap(net)
        self._networks[name] = net
        self._netOrder.append(name)
        return net

    def _createNode(self, name: str, role: NodeRole) -> Node:
        self._base._assertMutable()
        if name in self._nodes:
            raise DuplicateName(f"AS {self.asn} already has a node {name}")
        node = Node(self._base, self, name, self.asn, role)
        self._nodes[name] = node
        return node

    def createRouter(self, name: str) -> Node:
        return self._createNode(name, NodeRole.ROUTER)

    def createHost(self, name: str) -> Node:
        return self._createNode(name, NodeRole.HOST)

    def createRealWorldRouter(
        self,
        name: str,
        prefixes: Optional[list[str]] = None,
        prefixSource: Optional[Callable[[int], list[str]]] = None,
    ) -> Node:
        """Router that announces external prefixes and NATs traffic out.

        Prefixes come from an explicit list, a callable source, or the base
        layer's default provider, resolved at render.
        """
        if prefixes is not None and len(prefixes) == 0:
            raise EmptyPrefixSource(f"empty prefix list for {name}")
        node = self._createNode(name, NodeRole.REAL_WORLD_ROUTER)
        node.rwStaticPrefixes = list(prefixes) if prefixes is not None else None
        node._rwSource = prefixSource
        return node

    def getNetwork(self, name: str) -> Network:
        if name not in self._networks:
            raise UnknownNetwork(f"AS {self.asn} has no network {name}")
        return self._networks[name]

    def getNetworks(self) -> list[Network]:
        return [self._networks[n] for n in self._netOrder]

    def getNode(self, name: str) -> Node:
        if name not in self._nodes:
            raise UnknownNode(f"AS {self.asn} has no node {name}")
        return self._nodes[name]

    def getRouter(self, name: str) -> Node:
        return self.getNode(name)

    def getHost(self, name: str) -> Node:
        return self.getNode(name)

    def getNodes(self) -> list[Node]:
        return list(self._nodes.values())

    def getRouters(self) -> list[Node]:
        return [n for n in self._nodes.values() if n.role is not NodeRole.HOST]

    def describe(self) -> dict:
        return {"asn": self.asn, "networks": sorted(self._networks), "nodes": sorted(self._nodes)}


class InternetExchange:
    def __init__(self, base: "Base", id: int, net: Network):
        self._base = base
        self.id = id
        self.net = net

    def getPeeringLan(self) -> Network:
        return self.net

    def describe(self) -> dict:
        return {"id": self.id, "network": self.net.name}


class Base(Layer):
    """Materializes the physical topology into the registry."""

    name = "base"
    kind = "base"
    rank = 0

    def __init__(self):
        super().__init__()
        self._ids: set[int] = set()
        self._ases: dict[int, AutonomousSystem] = {}
        self._ixes: dict[int, InternetExchange] = {}
        self._ixNetworks: dict[str, Network] = {}
        self._allNetworks: list[Network] = []
        self._usedPorts: set[int] = set()
        self._rwProvider: Callable[[int], list[str]] = lambda asn: []

    def _checkId(self, id: int):
        if not (2 <= id <= 65535):
            raise EmulatorError(f"identifier {id} outside 2..65535")
        if id in self._ids:
            raise DuplicateId(f"identifier {id} already allocated")
        self._ids.add(id)

    def _checkOverlap(self, net: Network):
        for other in self._allNetworks:
            if net.prefix.overlaps(other.prefix):
                raise PrefixOverlap(
                    f"{net.name} {net.prefix} overlaps {other.name} {other.prefix}"
                )
        self._allNetworks.append(net)

    def createInternetExchange(self, id: int, prefix: Optional[str] = None) -> InternetExchange:
        self._assertMutable()
        self._checkId(id)
        if prefix is None:
            if id > 255:
                raise ExplicitPrefixRequired(
                    f"exchange id {id} exceeds the auto prefix range; pass a prefix"
                )
            prefix = f"10.{id}.0.0/24"
        net = Network(self, "ix", f"ix{id}", ipaddress.ip_network(prefix))
        self._checkOverlap(net)
        ix = InternetExchange(self, id, net)
        self._ixes[id] = ix
        self._ixNetworks[net.name] = net
        return ix

    def createAutonomousSystem(self, asn: int) -> AutonomousSystem:
        self._assertMutable()
        self._checkId(asn)
        asys = AutonomousSystem(self, asn)
        self._ases[asn] = asys
        return asys

    def getAutonomousSystem(self, asn: int) -> AutonomousSystem:
        if asn not in self._ases:
            raise UnknownNode(f"no AS {asn}")
        return self._ases[asn]

    def getInternetExchange(self, id: int) -> InternetExchange:
        if id not in self._ixes:
            raise UnknownNetwork(f"no exchange {id}")
        return self._ixes[id]

    def getAsns(self) -> list[int]:
        return sorted(self._ases)

    def getIxIds(self) -> list[int]:
        return sorted(self._ixes)

    def setRealWorldPrefixProvider(self, provider: Callable[[int], list[str]]):
        """Default source of announced prefixes for real-world routers."""
        self._assertMutable()
        self._rwProvider = provider
        return self

    def _registerNode(self, registry, asys: AutonomousSystem, node: Node):
        registry.register(str(asys.asn), "node", node.name, node)

    def configure(self, ctx: RenderContext):
        reg = ctx.registry
        for id in sorted(self._ixes):
            ix = self._ixes[id]
            reg.register("ix", "ix", str(id), ix)
            reg.register("ix", "network", ix.net.name, ix.net)
        for asn in sorted(self._ases):
            asys = self._ases[asn]
            reg.register(str(asn), "as", str(asn), asys)
            for net in asys.getNetworks():
                reg.register(str(asn), "network", net.name, net)
            for node in asys.getNodes():
                reg.register(str(asn), "node", node.name, node)

    def render(self, ctx: RenderContext):
        for asn in sorted(self._ases):
            for node in self._ases[asn].getNodes():
                if node.role is not NodeRole.REAL_WORLD_ROUTER:
                    continue
                if node.rwStaticPrefixes is not None:
                    node.rwPrefixes = list(node.rwStaticPrefixes)
                elif getattr(node, "_rwSource", None) is not None:
                    node.rwPrefixes = list(node._rwSource(node.asn))
                else:
                    node.rwPrefixes = list(self._rwProvider(node.asn))
                if not node.rwPrefixes:
                    raise EmptyPrefixSource(
                        f"real-world router {node.name} resolved no prefixes"
                    )
