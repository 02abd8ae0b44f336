"""Routing layers: OSPF underlay, IBGP full mesh, and EBGP peerings.

Policy model (RFC 8195 style large communities, data1 = 1 carries the origin
class in data2):

  data2   meaning      import preference
  0       own          -
  1       customer     30
  2       peer         20
  3       provider     10
  4       unfiltered   10

Routes tagged 0 or 1 are exported everywhere; routes tagged 2..4 are exported
only to customers (and over unfiltered sessions, which exchange everything).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

from .core import Emulator, Layer, NodeRole, RenderContext, RenderedEmulation
from .errors import (
    DuplicateSession,
    EmulatorError,
    NotAtExchange,
    NotRendered,
    UnknownNode,
)

ORIGIN_OWN = 0
ORIGIN_CUSTOMER = 1
ORIGIN_PEER = 2
ORIGIN_PROVIDER = 3
ORIGIN_UNFILTERED = 4

IMPORT_PREF = {
    ORIGIN_CUSTOMER: 30,
    ORIGIN_PEER: 20,
    ORIGIN_PROVIDER: 10,
    ORIGIN_UNFILTERED: 10,
}

LOOPBACK_POOL = "10.0.0.0/16"


class PeerRelationship(enum.Enum):
    Provider = "provider"
    Peer = "peer"
    Unfiltered = "unfiltered"


@dataclass(frozen=True)
class LargeCommunity:
    globalAdmin: int
    data1: int
    data2: int

    def render(self) -> str:
        return f"({self.globalAdmin}, {self.data1}, {self.data2})"


@dataclass
class EbgpSession:
    """One configured EBGP session at an exchange.

    For private peerings, left is the provider when the relationship is
    Provider.  For route-server sessions, left is the server.
    """

    ix: int
    kind: str  # "private" | "rs"
    leftAsn: int
    rightAsn: int
    relationship: PeerRelationship
    leftRouter: object
    rightRouter: object

    def involves(self, node) -> bool:
        return node is self.leftRouter or node is self.rightRouter


@dataclass
class IbgpMesh:
    asn: int
    sessionPairs: list[tuple[str, str]]


def buildIbgpMesh(asys) -> IbgpMesh:
    """Full mesh over all routers of the AS: n(n-1)/2 session pairs."""
    routers = sorted(asys.getRouters(), key=lambda r: r.name)
    pairs = [
        (routers[i].name, routers[j].name)
        for i in range(len(routers))
        for j in range(i + 1, len(routers))
    ]
    return IbgpMesh(asn=asys.asn, sessionPairs=pairs)


class Routing(Layer):
    """OSPF on internal networks, loopbacks, and IBGP full mesh per AS."""

    name = "routing"
    kind = "base"
    rank = 10

    def __init__(self):
        super().__init__()
        self._meshes: dict[int, IbgpMesh] = {}

    def getMeshes(self) -> dict[int, IbgpMesh]:
        return dict(self._meshes)

    def render(self, ctx: RenderContext):
        base = ctx.emulator.getLayer("base")
        for asn in base.getAsns():
            asys = base.getAutonomousSystem(asn)
            routers = asys.getRouters()
            for i, router in enumerate(routers, start=1):
                router.loopback = f"10.0.{i >> 8}.{i & 0xFF}"
            self._meshes[asn] = buildIbgpMesh(asys)

    def finalize(self, ctx: RenderContext):
        emulator = ctx.emulator
        for _, node in ctx.registry.byKind("node"):
            config = _configFor(emulator, node)
            if config is None:
                continue
            node.addSoftware("bird2")
            if node.loopback is not None:
                node.appendStartCommand(f"ip address add {node.loopback}/32 dev lo")
            if node.role is NodeRole.REAL_WORLD_ROUTER:
                node.appendStartCommand("iptables -t nat -A POSTROUTING -j MASQUERADE")
            node.appendStartCommand("bird -d &")
            node.setFile(config, "/etc/bird/bird.conf")


class Ebgp(Layer):
    """External BGP peerings at exchanges."""

    name = "ebgp"
    kind = "base"
    rank = 20

    def __init__(self):
        super().__init__()
        self._privates: list[tuple[int, int, int, PeerRelationship]] = []
        self._rsMembers: list[tuple[int, int]] = []
        self._privateKeys: set = set()
        self._rsKeys: set = set()
        self._sessions: list[EbgpSession] = []
        self._rsNodes: dict[int, object] = {}

    def addPrivatePeerings(self, ix: int, leftAsns, rightAsns, relationship: PeerRelationship):
        """Create one session per (left, right) pair at the exchange.

        With PeerRelationship.Provider the left side is the provider.
        """
        self._assertMutable()
        for a in leftAsns:
            for b in rightAsns:
                if a == b:
                    raise EmulatorError(f"AS {a} cannot peer with itself")
                key = (ix, frozenset((a, b)))
                if key in self._privateKeys:
                    raise DuplicateSession(f"AS {a} and AS {b} already peer at ix{ix}")
                self._privateKeys.add(key)
                self._privates.append((ix, a, b, relationship))
        return self

    def addRsPeer(self, ix: int, asn: int):
        self._assertMutable()
        key = (ix, asn)
        if key in self._rsKeys:
            raise DuplicateSession(f"AS {asn} already peers with the ix{ix} route server")
        self._rsKeys.add(key)
        self._rsMembers.append(key)
        return self

    def addRsPeers(self, ix: int, asns):
        for asn in asns:
            self.addRsPeer(ix, asn)
        return self

    def getSessions(self) -> list[EbgpSession]:
        return list(self._sessions)

    def sessionsForNode(self, node) -> list[EbgpSession]:
        return [s for s in self._sessions if s.involves(node)]

    def getRouteServers(self) -> dict[int, object]:
        return dict(self._rsNodes)

    def configure(self, ctx: RenderContext):
        from .base import Node  # local import to avoid a cycle at module load

        base = ctx.emulator.getLayer("base")
        for ix, a, b, rel in self._privates:
            left = self._routerAt(base, a, ix)
            right = self._routerAt(base, b, ix)
            self._sessions.append(
                EbgpSession(ix, "private", a, b, rel, left, right)
            )
        for ix, asn in self._rsMembers:
            if ix not in self._rsNodes:
                ixObj = base.getInternetExchange(ix)
                rs = Node(base, None, f"rs{ix}", ix, NodeRole.ROUTE_SERVER)
                rs.joinNetwork(ixObj.net.name)
                ctx.registry.register("ix", "node", rs.name, rs)
                self._rsNodes[ix] = rs
            member = self._routerAt(base, asn, ix)
            self._sessions.append(
                EbgpSession(ix, "rs", ix, asn, PeerRelationship.Peer, self._rsNodes[ix], member)
            )

    @staticmethod
    def _routerAt(base, asn: int, ix: int):
        try:
            asys = base.getAutonomousSystem(asn)
        except UnknownNode:
            raise NotAtExchange(f"AS {asn} has no router at ix{ix}") from None
        netName = f"ix{ix}"
        routers = [r for r in asys.getRouters() if r.addressOn(netName) is not None]
        if not routers:
            raise NotAtExchange(f"AS {asn} has no router at ix{ix}")
        routers.sort(key=lambda r: r.name)
        return routers[0]


def _communityList(asn: int, data2s) -> str:
    return ", ".join(LargeCommunity(asn, 1, d).render() for d in data2s)


def _sessionPolicy(asn: int, origin: int, exportAll: bool) -> list[str]:
    lines = [
        "    ipv4 {",
        "        import filter {",
        f"            bgp_large_community.add({LargeCommunity(asn, 1, origin).render()});",
        f"            bgp_local_pref = {IMPORT_PREF[origin]};",
        "            accept;",
        "        };",
    ]
    if exportAll:
        lines.append("        export all;")
    else:
        lines.append(
            f"        export where bgp_large_community ~ [{_communityList(asn, (0, 1))}];"
        )
    lines.append("    };")
    return lines


def _ebgpStanza(node, session: EbgpSession) -> list[str]:
    ixNet = f"ix{session.ix}"
    mine = node is session.leftRouter
    peer = session.rightRouter if mine else session.leftRouter
    peerAsn = session.rightAsn if mine else session.leftAsn
    localAddr = node.addressOn(ixNet)
    peerAddr = peer.addressOn(ixNet)

    if session.kind == "rs" and node.role is NodeRole.ROUTE_SERVER:
        name = f"rs_as{peerAsn}"
        body = [
            "    rs client;",
            "    ipv4 { import all; export all; };",
        ]
    else:
        if session.kind == "rs":
            name = f"ebgp_{ixNet}_rs"
            origin, exportAll = ORIGIN_PEER, False
        elif session.relationship is PeerRelationship.Unfiltered:
            name = f"ebgp_{ixNet}_as{peerAsn}"
            origin, exportAll = ORIGIN_UNFILTERED, True
        elif session.relationship is PeerRelationship.Peer:
            name = f"ebgp_{ixNet}_as{peerAsn}"
            origin, exportAll = ORIGIN_PEER, False
        elif mine:
            # left side of a Provider relationship: peer is my customer
            name = f"ebgp_{ixNet}_as{peerAsn}"
            origin, exportAll = ORIGIN_CUSTOMER, True
        else:
            name = f"ebgp_{ixNet}_as{peerAsn}"
            origin, exportAll = ORIGIN_PROVIDER, False
        body = _sessionPolicy(node.asn, origin, exportAll)

    return [
        f"protocol bgp {name} {{",
        f"    local {localAddr} as {node.asn};",
        f"    neighbor {peerAddr} as {peerAsn};",
        *body,
        "}",
        "",
    ]


def _configFor(emulator: Emulator, node) -> Optional[str]:
    """Build the full routing daemon config for a node; None for hosts."""
    if node.role is NodeRole.HOST:
        return None

    lines: list[str] = []
    rid = node.loopback or (node.interfaces[0].address if node.interfaces else "0.0.0.0")
    lines += [f"router id {rid};", "", "log stderr all;", ""]
    lines += ["protocol device {", "}", ""]
    lines += ["protocol kernel {", "    ipv4 { import none; export all; };", "}", ""]

    ownPrefixes: list[tuple[str, int]] = []
    if node._asys is not None:
        ownPrefixes += [(str(n.prefix), ORIGIN_OWN) for n in node._asys.getNetworks()]
    if node.role is NodeRole.REAL_WORLD_ROUTER:
        ownPrefixes += [(p, ORIGIN_OWN) for p in node.rwPrefixes]
    if ownPrefixes:
        lines.append("protocol static own_networks {")
        lines.append("    ipv4;")
        for prefix, origin in ownPrefixes:
            lines.append(f"    route {prefix} blackhole {{")
            lines.append(
                f"        bgp_large_community.add({LargeCommunity(node.asn, 1, origin).render()});"
            )
            lines.append("    };")
        lines += ["}", ""]

    if node.role is not NodeRole.ROUTE_SERVER:
        lines.append("protocol ospf ospf1 {")
        lines.append("    ipv4 { import all; export all; };")
        lines.append("    area 0 {")
        if node.loopback is not None:
            lines += ['        interface "lo" {', "            stub;", "        };"]
        for iface in node.interfaces:
            if iface.net.isExchange:
                lines += [f'        interface "{iface.net.name}" {{', "            stub;", "        };"]
            else:
                lines += [f'        interface "{iface.net.name}" {{', "        };"]
        lines += ["    }", "}", ""]

    if node._asys is not None and emulator.hasLayer("routing"):
        meshes = emulator.getLayer("routing").getMeshes()
        mesh = meshes.get(node.asn)
        if mesh is not None:
            peers = sorted(
                {b if a == node.name else a for a, b in mesh.sessionPairs if node.name in (a, b)}
            )
            for peerName in peers:
                peer = node._asys.getNode(peerName)
                lines += [
                    f"protocol bgp ibgp_{peerName} {{",
                    f"    local {node.loopback} as {node.asn};",
                    f"    neighbor {peer.loopback} as {node.asn};",
                    "    ipv4 { import all; export all; };",
                    "}",
                    "",
                ]

    if emulator.hasLayer("ebgp"):
        sessions = emulator.getLayer("ebgp").sessionsForNode(node)
        sessions.sort(key=lambda s: (s.ix, s.rightAsn if node is s.leftRouter else s.leftAsn, s.kind))
        for session in sessions:
            lines += _ebgpStanza(node, session)

    return "\n".join(lines).rstrip() + "\n"


def emitRouterConfig(rendered: Union[RenderedEmulation, Emulator], node) -> Optional[str]:
    """Routing daemon config text for one node of a rendered emulation.

    Pure over the rendered model: recomputes the same bytes that render
    placed at /etc/bird/bird.conf.  Returns None for host-role nodes.
    """
    if isinstance(rendered, RenderedEmulation):
        emulator = rendered.emulator
    else:
        emulator = rendered
    if not emulator.rendered:
        raise NotRendered("emitRouterConfig needs a rendered emulation")
    if isinstance(node, str):
        raise EmulatorError("pass a node object, not a name")
    return _configFor(emulator, node)
