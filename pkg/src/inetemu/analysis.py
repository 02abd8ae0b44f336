"""Static control-plane analysis over a rendered emulation.

The analyzer mirrors the session policies the routing layer emits: routes are
classified by how they were learned (own, customer, peer, provider,
unfiltered), re-exported only where the class permits, and ranked by class
preference, then AS-path length, then lowest neighbor ASN, then lowest
exchange id.  Route-server sessions behave as transparent multilateral
peerings: the server never appears in AS paths.

computeRibs keeps the best route per class at every AS and iterates to a
fixed point, which realizes the best policy-permitted path for every
(AS, prefix) pair.
"""

from __future__ import annotations

import ipaddress
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Union

from .core import NodeRole, RenderedEmulation
from .errors import EmulatorError, UnknownNode
from .routing import (
    ORIGIN_CUSTOMER,
    ORIGIN_OWN,
    ORIGIN_PEER,
    ORIGIN_PROVIDER,
    ORIGIN_UNFILTERED,
    PeerRelationship,
)

PREF = {
    ORIGIN_OWN: 40,
    ORIGIN_CUSTOMER: 30,
    ORIGIN_PEER: 20,
    ORIGIN_PROVIDER: 10,
    ORIGIN_UNFILTERED: 10,
}

CLASS_NAMES = {
    ORIGIN_OWN: "own",
    ORIGIN_CUSTOMER: "customer",
    ORIGIN_PEER: "peer",
    ORIGIN_PROVIDER: "provider",
    ORIGIN_UNFILTERED: "unfiltered",
}


@dataclass(frozen=True)
class PolicyEdge:
    """One session between two ASes; a is the provider when directional."""

    a: int
    b: int
    relationship: PeerRelationship
    ix: int
    routerA: str
    routerB: str
    viaRs: bool = False

    def other(self, asn: int) -> int:
        return self.b if asn == self.a else self.a

    def routerOf(self, asn: int) -> str:
        return self.routerA if asn == self.a else self.routerB

    def classAt(self, receiver: int) -> int:
        if self.relationship is PeerRelationship.Unfiltered:
            return ORIGIN_UNFILTERED
        if self.relationship is PeerRelationship.Peer:
            return ORIGIN_PEER
        return ORIGIN_PROVIDER if receiver == self.b else ORIGIN_CUSTOMER

    def exportAllowed(self, sender: int, routeClass: int) -> bool:
        if self.relationship is PeerRelationship.Unfiltered:
            return True
        if self.relationship is PeerRelationship.Provider and sender == self.a:
            return True  # everything goes to a customer
        return routeClass in (ORIGIN_OWN, ORIGIN_CUSTOMER)


@dataclass(frozen=True)
class Route:
    prefix: str
    cls: int
    path: tuple[int, ...]  # first hop .. origin; empty for own routes
    ix: Optional[int] = None
    egressRouter: Optional[str] = None
    entryRouter: Optional[str] = None

    @property
    def pref(self) -> int:
        return PREF[self.cls]

    def key(self) -> tuple:
        first = self.path[0] if self.path else -1
        return (-self.pref, len(self.path), first, self.ix if self.ix is not None else -1, self.path)


@dataclass
class RibEntry:
    prefix: str
    asPath: list[int]
    learnedFrom: str
    pref: int
    nextHopAsn: Optional[int]
    ix: Optional[int]
    egressRouter: Optional[str]

    def describe(self) -> dict:
        return {
            "prefix": self.prefix,
            "asPath": list(self.asPath),
            "learnedFrom": self.learnedFrom,
            "pref": self.pref,
            "nextHopAsn": self.nextHopAsn,
            "ix": self.ix,
            "egressRouter": self.egressRouter,
        }


class ControlPlaneModel:
    """AS graph, per-AS internal graphs, and prefix originations."""

    def __init__(self):
        self.asns: list[int] = []
        self.edges: list[PolicyEdge] = []
        self.originations: list[tuple[ipaddress.IPv4Network, int]] = []
        self.nodesByAs: dict[int, dict[str, object]] = {}
        self.intraAdj: dict[int, dict[str, set[str]]] = {}
        self.addrOwner: dict[int, dict[str, str]] = {}
        self.rwByAs: dict[int, list[tuple[ipaddress.IPv4Network, str]]] = {}

    @staticmethod
    def fromRendered(rendered: RenderedEmulation) -> "ControlPlaneModel":
        model = ControlPlaneModel()
        base = rendered.getLayer("base")
        model.asns = base.getAsns()

        for asn in model.asns:
            asys = base.getAutonomousSystem(asn)
            nodes = {n.name: n for n in asys.getNodes()}
            model.nodesByAs[asn] = nodes
            adj: dict[str, set[str]] = {name: set() for name in nodes}
            byNet: dict[str, list[str]] = {}
            owner: dict[str, str] = {}
            for name, node in nodes.items():
                for net, addr in node.getInterfaces():
                    owner[addr] = name
                    if not net.isExchange:
                        byNet.setdefault(net.name, []).append(name)
            for members in byNet.values():
                for x in members:
                    for y in members:
                        if x != y:
                            adj[x].add(y)
            model.intraAdj[asn] = adj
            model.addrOwner[asn] = owner

            for net in asys.getNetworks():
                model.originations.append((net.prefix, asn))
            rws = []
            for node in asys.getNodes():
                if node.role is NodeRole.REAL_WORLD_ROUTER:
                    for p in node.rwPrefixes:
                        pfx = ipaddress.ip_network(p)
                        model.originations.append((pfx, asn))
                        rws.append((pfx, node.name))
            model.rwByAs[asn] = rws

        rsGroups: dict[int, list] = {}
        for session in rendered.ebgpSessions():
            if session.kind == "private":
                model.edges.append(
                    PolicyEdge(
                        a=session.leftAsn,
                        b=session.rightAsn,
                        relationship=session.relationship,
                        ix=session.ix,
                        routerA=session.leftRouter.name,
                        routerB=session.rightRouter.name,
                    )
                )
            else:
                rsGroups.setdefault(session.ix, []).append(session)
        for ix, sessions in sorted(rsGroups.items()):
            for i in range(len(sessions)):
                for j in range(i + 1, len(sessions)):
                    si, sj = sessions[i], sessions[j]
                    model.edges.append(
                        PolicyEdge(
                            a=si.rightAsn,
                            b=sj.rightAsn,
                            relationship=PeerRelationship.Peer,
                            ix=ix,
                            routerA=si.rightRouter.name,
                            routerB=sj.rightRouter.name,
                            viaRs=True,
                        )
                    )
        return model

    def withAnnouncement(self, asn: int, prefix: str) -> "ControlPlaneModel":
        """Copy of the model with one extra origination."""
        clone = ControlPlaneModel()
        clone.asns = list(self.asns)
        clone.edges = list(self.edges)
        clone.originations = list(self.originations) + [(ipaddress.ip_network(prefix), asn)]
        clone.nodesByAs = self.nodesByAs
        clone.intraAdj = self.intraAdj
        clone.addrOwner = self.addrOwner
        clone.rwByAs = self.rwByAs
        return clone


@dataclass
class Ribs:
    selected: dict[int, dict[str, Route]]
    iterations: int

    def entriesFor(self, asn: int) -> list[RibEntry]:
        out = []
        for prefix in sorted(self.selected.get(asn, {})):
            route = self.selected[asn][prefix]
            out.append(
                RibEntry(
                    prefix=prefix,
                    asPath=list(route.path),
                    learnedFrom=CLASS_NAMES[route.cls],
                    pref=route.pref,
                    nextHopAsn=route.path[0] if route.path else None,
                    ix=route.ix,
                    egressRouter=route.egressRouter,
                )
            )
        return out

    def routerRibs(self, model: ControlPlaneModel) -> dict[str, list[RibEntry]]:
        """Per-router view: IBGP distributes the AS selection to every router."""
        out: dict[str, list[RibEntry]] = {}
        for asn in model.asns:
            entries = self.entriesFor(asn)
            for name, node in sorted(model.nodesByAs[asn].items()):
                if node.role is not NodeRole.HOST:
                    out[f"{asn}/{name}"] = entries
        return out


def computeRibs(model: ControlPlaneModel) -> Ribs:
    """Fixed point of policy-filtered route propagation.

    State holds the best route per (AS, prefix, class); every sweep offers
    each neighbor the exportable entries.  Terminates within
    |ASes| * |prefixes| sweeps on DAG-of-providers topologies.
    """
    state: dict[int, dict[str, dict[int, Route]]] = {asn: {} for asn in model.asns}
    for prefix, asn in model.originations:
        if asn not in state:
            continue
        own = Route(prefix=str(prefix), cls=ORIGIN_OWN, path=())
        perPrefix = state[asn].setdefault(str(prefix), {})
        if ORIGIN_OWN not in perPrefix:
            perPrefix[ORIGIN_OWN] = own

    iterations = 0
    bound = max(1, len(model.asns)) * max(1, len({str(p) for p, _ in model.originations})) + 1
    changed = True
    while changed:
        changed = False
        iterations += 1
        if iterations > bound:
            raise EmulatorError("route propagation failed to converge")
        for edge in model.edges:
            for sender, receiver in ((edge.a, edge.b), (edge.b, edge.a)):
                recvClass = edge.classAt(receiver)
                for prefix, perClass in state[sender].items():
                    for route in list(perClass.values()):
                        if not edge.exportAllowed(sender, route.cls):
                            continue
                        if receiver in route.path or receiver == sender:
                            continue
                        candidate = Route(
                            prefix=prefix,
                            cls=recvClass,
                            path=(sender,) + route.path,
                            ix=edge.ix,
                            egressRouter=edge.routerOf(receiver),
                            entryRouter=edge.routerOf(sender),
                        )
                        slot = state[receiver].setdefault(prefix, {})
                        best = slot.get(recvClass)
                        if best is None or candidate.key() < best.key():
                            slot[recvClass] = candidate
                            changed = True

    selected: dict[int, dict[str, Route]] = {}
    for asn in model.asns:
        selected[asn] = {}
        for prefix, perClass in state[asn].items():
            best = min(perClass.values(), key=lambda r: r.key())
            selected[asn][prefix] = best
    return Ribs(selected=selected, iterations=iterations)


def _lpm(table: dict[str, Route], address: str) -> Optional[Route]:
    addr = ipaddress.ip_address(address)
    best, bestLen = None, -1
    for prefix, route in table.items():
        net = ipaddress.ip_network(prefix)
        if addr in net and net.prefixlen > bestLen:
            best, bestLen = route, net.prefixlen
    return best


def _intraPath(model: ControlPlaneModel, asn: int, src: str, dst: str) -> Optional[list[str]]:
    if src == dst:
        return [src]
    adj = model.intraAdj[asn]
    prev: dict[str, str] = {src: src}
    queue = deque([src])
    while queue:
        cur = queue.popleft()
        for nxt in sorted(adj.get(cur, ())):
            if nxt not in prev:
                prev[nxt] = cur
                if nxt == dst:
                    path = [dst]
                    while path[-1] != src:
                        path.append(prev[path[-1]])
                    return list(reversed(path))
                queue.append(nxt)
    return None


def _parseNodeSpec(model: ControlPlaneModel, spec) -> tuple[int, str]:
    if isinstance(spec, tuple):
        asn, name = int(spec[0]), spec[1]
    elif isinstance(spec, str):
        if "/" not in spec:
            raise UnknownNode(f"node spec must be 'asn/name': {spec!r}")
        asnText, name = spec.split("/", 1)
        asn = int(asnText.removeprefix("as"))
    else:
        asn, name = spec.asn, spec.name
    if asn not in model.nodesByAs or name not in model.nodesByAs[asn]:
        raise UnknownNode(f"no node {name} in AS {asn}")
    return asn, name


def tracePath(
    model: ControlPlaneModel,
    srcNode,
    dstAddress: str,
    ribs: Optional[Ribs] = None,
) -> Optional[list[str]]:
    """Node-level forwarding path, or None when the address is unreachable.

    Inter-AS hops follow each AS's selected route; intra-AS hops follow
    shortest paths over shared internal networks.
    """
    if ribs is None:
        ribs = computeRibs(model)
    asn, nodeName = _parseNodeSpec(model, srcNode)
    path: list[str] = []
    current = nodeName
    visited: set[int] = set()

    def push(label: str) -> None:
        if not path or path[-1] != label:
            path.append(label)

    while True:
        if asn in visited:
            return None
        visited.add(asn)
        route = _lpm(ribs.selected.get(asn, {}), dstAddress)
        if route is None:
            return None
        if route.cls == ORIGIN_OWN:
            target = model.addrOwner[asn].get(dstAddress)
            if target is None:
                addr = ipaddress.ip_address(dstAddress)
                for pfx, rwName in model.rwByAs.get(asn, []):
                    if addr in pfx:
                        target = rwName
                        break
            if target is None:
                # announced here but owned by nothing we model: delivery point
                push(f"{asn}/{current}")
                return path
            hop = _intraPath(model, asn, current, target)
            if hop is None:
                return None
            for n in hop:
                push(f"{asn}/{n}")
            return path
        hop = _intraPath(model, asn, current, route.egressRouter)
        if hop is None:
            return None
        for n in hop:
            push(f"{asn}/{n}")
        nextAsn = route.path[0]
        push(f"{nextAsn}/{route.entryRouter}")
        asn, current = nextAsn, route.entryRouter


@dataclass
class PathDiff:
    probe: str
    prefix: str
    announcer: int
    changes: dict[int, tuple[Optional[list[int]], Optional[list[int]]]] = field(default_factory=dict)

    def flippedTo(self, asn: int) -> list[int]:
        return sorted(
            src
            for src, (_, new) in self.changes.items()
            if new is not None and new and new[-1] == asn
        )

    def describe(self) -> dict:
        return {
            "probe": self.probe,
            "prefix": self.prefix,
            "announcer": self.announcer,
            "changes": {
                str(asn): {"old": old, "new": new}
                for asn, (old, new) in sorted(self.changes.items())
            },
        }


def _asLevelPath(ribs: Ribs, asn: int, address: str) -> Optional[list[int]]:
    route = _lpm(ribs.selected.get(asn, {}), address)
    if route is None:
        return None
    return [asn] + list(route.path)


def whatIfAnnounce(model: ControlPlaneModel, announcerAsn: int, prefix: str) -> PathDiff:
    """Recompute routing with one extra announcement and report path changes."""
    if announcerAsn not in model.asns:
        raise UnknownNode(f"no AS {announcerAsn}")
    net = ipaddress.ip_network(prefix)
    probe = str(net.network_address + 1)
    before = computeRibs(model)
    after = computeRibs(model.withAnnouncement(announcerAsn, prefix))
    diff = PathDiff(probe=probe, prefix=prefix, announcer=announcerAsn)
    for asn in model.asns:
        old = _asLevelPath(before, asn, probe)
        new = _asLevelPath(after, asn, probe)
        if old != new:
            diff.changes[asn] = (old, new)
    return diff
