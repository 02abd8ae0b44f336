"""Topology documents derived from compiled manifests or a live runtime.

The manifest is the source of truth in offline mode: every container's
emu.node.* and emu.net.* labels are parsed back into nodes and attachments,
so the map needs no access to the original composition program.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import yaml

from ..errors import MissingLabels

REQUIRED_NODE_LABELS = ("emu.node.name", "emu.node.asn", "emu.node.role")


@dataclass
class NodeInfo:
    id: str
    name: str
    asn: int
    role: str
    displayName: str = ""
    description: str = ""
    interfaces: list[tuple[str, str]] = field(default_factory=list)

    def toJson(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "asn": self.asn,
            "role": self.role,
            "displayName": self.displayName,
            "description": self.description,
            "interfaces": [
                {"net": net, "address": addr} for net, addr in self.interfaces
            ],
        }


@dataclass
class NetInfo:
    name: str
    scope: str
    prefix: str

    def toJson(self) -> dict:
        return {"name": self.name, "scope": self.scope, "prefix": self.prefix}


@dataclass
class TopologyDocument:
    nodes: list[NodeInfo] = field(default_factory=list)
    networks: list[NetInfo] = field(default_factory=list)

    def node(self, id: str) -> NodeInfo | None:
        for n in self.nodes:
            if n.id == id:
                return n
        return None

    def edges(self) -> list[dict]:
        return [
            {"node": n.id, "net": net, "address": addr}
            for n in self.nodes
            for net, addr in n.interfaces
        ]

    def toJson(self) -> dict:
        return {
            "nodes": [n.toJson() for n in self.nodes],
            "networks": [n.toJson() for n in self.networks],
            "edges": self.edges(),
        }


def _nodeFromLabels(serviceName: str, labels: dict) -> NodeInfo:
    for key in REQUIRED_NODE_LABELS:
        if key not in labels:
            raise MissingLabels(f"service {serviceName} lacks label {key}")
    node = NodeInfo(
        id=serviceName,
        name=labels["emu.node.name"],
        asn=int(labels["emu.node.asn"]),
        role=labels["emu.node.role"],
        displayName=labels.get("emu.node.displayname", ""),
        description=labels.get("emu.node.description", ""),
    )
    i = 0
    while f"emu.net.{i}.name" in labels:
        node.interfaces.append(
            (labels[f"emu.net.{i}.name"], labels.get(f"emu.net.{i}.address", ""))
        )
        i += 1
    return node


def loadTopology(manifestDir: str) -> TopologyDocument:
    """Parse the manifest under manifestDir back into a topology."""
    path = os.path.join(manifestDir, "docker-compose.yml")
    with open(path) as f:
        doc = yaml.safe_load(f) or {}
    topology = TopologyDocument()
    for serviceName in sorted(doc.get("services") or {}):
        entry = doc["services"][serviceName] or {}
        labels = entry.get("labels") or {}
        topology.nodes.append(_nodeFromLabels(serviceName, labels))
    for netKey in sorted(doc.get("networks") or {}):
        entry = doc["networks"][netKey] or {}
        labels = entry.get("labels") or {}
        subnet = ""
        ipam = entry.get("ipam") or {}
        for cfg in ipam.get("config") or []:
            subnet = cfg.get("subnet", subnet)
        topology.networks.append(
            NetInfo(
                name=labels.get("emu.net.name", netKey),
                scope=labels.get("emu.net.scope", ""),
                prefix=labels.get("emu.net.prefix", subnet),
            )
        )
    return topology


def topologyFromContainers(containers: list[dict]) -> TopologyDocument:
    """Topology from a live runtime's container listing.

    Each entry needs Names[0] (or Id) and a Labels map carrying the same
    emu.* labels the compiler wrote.
    """
    topology = TopologyDocument()
    seenNets: dict[str, NetInfo] = {}
    for entry in containers:
        names = entry.get("Names") or []
        cid = (names[0].lstrip("/") if names else None) or entry.get("Id", "")[:12]
        labels = entry.get("Labels") or {}
        if "emu.node.name" not in labels:
            continue  # not one of ours
        node = _nodeFromLabels(cid, labels)
        topology.nodes.append(node)
        for net, _ in node.interfaces:
            seenNets.setdefault(net, NetInfo(name=net, scope="", prefix=""))
    topology.networks = [seenNets[k] for k in sorted(seenNets)]
    return topology
