"""Independent reference implementations used to cross-check the package.

Nothing here imports the analyzer's policy helpers: route classification,
export permission, and preference are re-derived from the raw relationship
enum so the two implementations can disagree.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Optional

from inetemu.routing import PeerRelationship

OWN, CUSTOMER, PEER, PROVIDER, UNFILTERED = 0, 1, 2, 3, 4
ORACLE_PREF = {OWN: 40, CUSTOMER: 30, PEER: 20, PROVIDER: 10, UNFILTERED: 10}


@dataclass(frozen=True)
class Candidate:
    cls: int
    path: tuple[int, ...]
    ix: int = -1
    egressRouter: Optional[str] = None
    entryRouter: Optional[str] = None

    def key(self) -> tuple:
        first = self.path[0] if self.path else -1
        return (-ORACLE_PREF[self.cls], len(self.path), first, self.ix, self.path)


def _classOnReceive(edge, receiver: int) -> int:
    if edge.relationship is PeerRelationship.Unfiltered:
        return UNFILTERED
    if edge.relationship is PeerRelationship.Peer:
        return PEER
    # directional: edge.a is the provider
    return PROVIDER if receiver == edge.b else CUSTOMER


def _mayExport(edge, sender: int, cls: int) -> bool:
    if edge.relationship is PeerRelationship.Unfiltered:
        return True
    if edge.relationship is PeerRelationship.Provider and sender == edge.a:
        return True
    return cls in (OWN, CUSTOMER)


def floodRoutes(model) -> dict[int, dict[str, Candidate]]:
    """Enumerate every policy-permitted loop-free path, then pick favorites.

    Flood-to-saturation: each AS accumulates the full set of permitted
    candidates per prefix, regardless of what it would itself select.
    """
    known: dict[int, dict[str, set[Candidate]]] = {
        asn: {} for asn in model.asns
    }
    for prefix, asn in model.originations:
        known[asn].setdefault(str(prefix), set()).add(Candidate(OWN, ()))

    changed = True
    while changed:
        changed = False
        for edge in model.edges:
            for sender, receiver in ((edge.a, edge.b), (edge.b, edge.a)):
                senderRoutes = known[sender]
                recvCls = _classOnReceive(edge, receiver)
                for prefix, cands in senderRoutes.items():
                    for cand in list(cands):
                        if not _mayExport(edge, sender, cand.cls):
                            continue
                        newPath = (sender,) + cand.path
                        if receiver in newPath:
                            continue
                        egress = edge.routerA if receiver == edge.a else edge.routerB
                        entry = edge.routerB if receiver == edge.a else edge.routerA
                        new = Candidate(
                            recvCls, newPath, edge.ix, egressRouter=egress, entryRouter=entry
                        )
                        bucket = known[receiver].setdefault(prefix, set())
                        if new not in bucket:
                            bucket.add(new)
                            changed = True

    best: dict[int, dict[str, Candidate]] = {}
    for asn, table in known.items():
        best[asn] = {
            prefix: min(cands, key=lambda c: c.key()) for prefix, cands in table.items()
        }
    return best


def relationshipMap(model) -> dict[frozenset, list]:
    rels: dict[frozenset, list] = {}
    for edge in model.edges:
        rels.setdefault(frozenset((edge.a, edge.b)), []).append(edge)
    return rels


def isValleyFree(fullPath: list[int], model) -> bool:
    """up* (peer)? down* over provider/peer edges; unfiltered hops pass.

    Parallel sessions between the same pair make the hop kind ambiguous, so
    this simulates the set of reachable stages (an NFA) instead of one stage.
    """
    rels = relationshipMap(model)
    UP, FLAT, DOWN = 0, 1, 2
    stages = {UP}
    for x, y in zip(fullPath, fullPath[1:]):
        edges = rels.get(frozenset((x, y)), [])
        if not edges:
            return False
        steps = set()
        for e in edges:
            if e.relationship is PeerRelationship.Unfiltered:
                steps.add("any")
            elif e.relationship is PeerRelationship.Peer:
                steps.add("peer")
            elif x == e.b:
                steps.add("up")  # customer x forwarding to provider y
            else:
                steps.add("down")
        nextStages = set()
        for s in stages:
            for step in steps:
                if step == "any":
                    nextStages.add(s)
                elif step == "up" and s == UP:
                    nextStages.add(UP)
                elif step == "peer" and s == UP:
                    nextStages.add(FLAT)
                elif step == "down":
                    nextStages.add(DOWN)
        if not nextStages:
            return False
        stages = nextStages
    return True


# DNS: resolve names by walking the emitted zone files, like a resolver would


def collectZoneFiles(rendered) -> dict[str, str]:
    """Map zone fqdn -> master zone file content from rendered nodes."""
    zones: dict[str, str] = {}
    for node in rendered.getNodes():
        for spec in node.getFiles():
            m = re.fullmatch(r"/etc/zones/(.*)zone", spec.path)
            if m and spec.content and "SOA" in spec.content:
                zones[m.group(1)] = spec.content
    return zones


def _zoneRecords(content: str, zone: str) -> list[tuple[str, str, str]]:
    """(owner fqdn, type, rdata) triples with owners expanded to fqdns."""
    out = []
    for line in content.splitlines():
        line = line.strip()
        if not line or line.startswith("$") or " SOA " in line:
            continue
        parts = line.split()
        if "IN" in parts:
            parts.remove("IN")
        if len(parts) < 3:
            continue
        owner, rtype, rdata = parts[0], parts[1], " ".join(parts[2:])
        if owner == "@":
            owner = zone
        elif not owner.endswith("."):
            owner = f"{owner}.{zone}" if zone != "." else f"{owner}."
        out.append((owner, rtype, rdata))
    return out


def resolveName(rendered, qname: str) -> set[str]:
    """Follow delegations from the root zone down; returns A rdata set."""
    zones = collectZoneFiles(rendered)
    if "." not in zones:
        return set()
    current = "."
    for _ in range(16):
        records = _zoneRecords(zones[current], current)
        answers = {r for o, t, r in records if o == qname and t == "A"}
        if answers:
            return answers
        delegations = sorted(
            {o for o, t, _ in records if t == "NS" and o != current and _isUnder(qname, o)},
            key=len,
            reverse=True,
        )
        if not delegations:
            return set()
        child = delegations[0]
        if child not in zones:
            return set()
        current = child
    return set()


def _isUnder(qname: str, zone: str) -> bool:
    return qname == zone or qname.endswith(f".{zone}") or zone == "."


def ibgpSessionCount(routerCount: int) -> int:
    return routerCount * (routerCount - 1) // 2


def allPairs(items):
    return list(itertools.combinations(items, 2))
