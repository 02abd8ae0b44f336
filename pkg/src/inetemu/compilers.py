"""Compilation of a rendered emulation into runnable artifacts.

compileContainers writes one build directory per node plus a Compose-style
manifest; compileGraph emits a DOT document of the topology.  Both are pure
functions of the rendered model: same input, same bytes.
"""

from __future__ import annotations

import ipaddress
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .core import NodeRole, RenderedEmulation
from .errors import EmulatorError

DEFAULT_BASE_IMAGE = "ubuntu:22.04"

ROLE_TAGS = {
    NodeRole.HOST: "h",
    NodeRole.ROUTER: "r",
    NodeRole.ROUTE_SERVER: "rs",
    NodeRole.REAL_WORLD_ROUTER: "rw",
}

KEEPALIVE = "tail -f /dev/null"


@dataclass
class ContainerSpec:
    """One container to build and run."""

    name: str
    role: str
    asn: int
    nodeName: str
    baseImage: str
    labels: dict[str, str]
    networks: list[tuple[str, str]]  # (compose network key, address)
    software: list[str]
    files: list[tuple[str, str]]  # (node path, content)
    buildCommands: list[str]
    startCommands: list[str]
    ports: list[str] = field(default_factory=list)

    def dockerfile(self) -> str:
        lines = [f"FROM {self.baseImage}"]
        if self.software:
            pkgs = " ".join(sorted(self.software))
            lines.append(
                f"RUN apt-get update && apt-get install -y --no-install-recommends {pkgs}"
            )
        if self.files:
            lines.append("COPY files/ /")
        for cmd in self.buildCommands:
            lines.append(f"RUN {cmd}")
        lines.append("COPY start.sh /start.sh")
        lines.append("RUN chmod +x /start.sh")
        lines.append('CMD ["/start.sh"]')
        return "\n".join(lines) + "\n"

    def startScript(self) -> str:
        lines = ["#!/bin/bash"] + list(self.startCommands) + [KEEPALIVE]
        return "\n".join(lines) + "\n"


def containerName(node) -> str:
    return f"as{node.asn}{ROLE_TAGS[node.role]}-{node.name}"


def _composeNetKey(net) -> str:
    return f"net_{net.scope}_{net.name}"


def _nodeLabels(node) -> dict[str, str]:
    labels = {
        "emu.node.name": node.name,
        "emu.node.asn": str(node.asn),
        "emu.node.role": node.role.value,
        "emu.node.displayname": node.displayName or "",
        "emu.node.description": node.description or "",
    }
    for i, (net, addr) in enumerate(node.getInterfaces()):
        labels[f"emu.net.{i}.name"] = net.name
        labels[f"emu.net.{i}.address"] = addr
    return labels


def _stagedFiles(node) -> list[tuple[str, str]]:
    out = []
    for spec in sorted(node.getFiles(), key=lambda f: f.path):
        if spec.content is not None:
            out.append((spec.path, spec.content))
        else:
            try:
                with open(spec.hostPath) as f:
                    out.append((spec.path, f.read()))
            except OSError as e:
                raise EmulatorError(
                    f"cannot import {spec.hostPath} for {node.name}: {e}"
                ) from e
    return out


def _nodeSpec(node, baseImage: str) -> ContainerSpec:
    return ContainerSpec(
        name=containerName(node),
        role=node.role.value,
        asn=node.asn,
        nodeName=node.name,
        baseImage=baseImage,
        labels=_nodeLabels(node),
        networks=[(_composeNetKey(net), addr) for net, addr in node.getInterfaces()],
        software=node.getSoftware(),
        files=_stagedFiles(node),
        buildCommands=node.getBuildCommands(),
        startCommands=node.getStartCommands(),
    )


def _firstFreeHostAddress(net) -> str:
    """First unused host-pool address, computed without touching the model."""
    cur = int(net.prefix.network_address) + 71
    top = int(net.prefix.broadcast_address)
    while cur < top and str(ipaddress.ip_address(cur)) in net.addresses:
        cur += 1
    if cur >= top:
        raise EmulatorError(f"no free address on {net.name} for the access service")
    return str(ipaddress.ip_address(cur))


def _vpnSpec(net, baseImage: str) -> ContainerSpec:
    spec = net.remoteAccess
    name = f"as{net.scope}svc-{spec.serviceKind}-{net.name}"
    addr = _firstFreeHostAddress(net)
    return ContainerSpec(
        name=name,
        role="svc",
        asn=int(net.scope),
        nodeName=f"{spec.serviceKind}-{net.name}",
        baseImage=baseImage,
        labels={
            "emu.node.name": f"{spec.serviceKind}-{net.name}",
            "emu.node.asn": net.scope,
            "emu.node.role": "svc",
            "emu.node.displayname": "",
            "emu.node.description": f"remote access into {net.name}",
            "emu.net.0.name": net.name,
            "emu.net.0.address": addr,
        },
        networks=[(_composeNetKey(net), addr)],
        software=["openvpn"],
        files=[],
        buildCommands=[],
        startCommands=[
            "mkdir -p /dev/net && mknod /dev/net/tun c 10 200 || true",
            "openvpn --dev tap0 --proto udp --port 1194 --server-bridge &",
        ],
        ports=[f"{spec.exposedPort}:1194/udp"],
    )


@dataclass
class ManifestDocument:
    outDir: Optional[str]
    specs: list[ContainerSpec]
    document: dict

    def toYaml(self) -> str:
        return yaml.safe_dump(self.document, sort_keys=True, default_flow_style=False)

    def serviceNames(self) -> list[str]:
        return sorted(self.document["services"])


def buildManifest(rendered: RenderedEmulation, baseImage: str = DEFAULT_BASE_IMAGE) -> ManifestDocument:
    """Assemble container specs and the manifest document without writing."""
    specs = [
        _nodeSpec(node, baseImage)
        for _, node in rendered.registry.byKind("node")
    ]
    for _, net in rendered.registry.byKind("network"):
        if net.remoteAccess is not None:
            specs.append(_vpnSpec(net, baseImage))
    specs.sort(key=lambda s: s.name)

    services = {}
    for spec in specs:
        entry: dict = {
            "build": f"./{spec.name}",
            "container_name": spec.name,
            "cap_add": ["NET_ADMIN"],
            "labels": dict(spec.labels),
            "networks": {
                key: {"ipv4_address": addr} for key, addr in spec.networks
            },
        }
        if spec.ports:
            entry["ports"] = list(spec.ports)
        services[spec.name] = entry

    networks = {}
    for _, net in rendered.registry.byKind("network"):
        networks[_composeNetKey(net)] = {
            "driver": "bridge",
            "ipam": {"config": [{"subnet": str(net.prefix)}]},
            "labels": {
                "emu.net.name": net.name,
                "emu.net.scope": net.scope,
                "emu.net.prefix": str(net.prefix),
            },
        }

    return ManifestDocument(
        outDir=None,
        specs=specs,
        document={"services": services, "networks": networks},
    )


def compileContainers(
    rendered: RenderedEmulation,
    outDir: str,
    baseImage: str = DEFAULT_BASE_IMAGE,
) -> ManifestDocument:
    """Write per-node build directories and the manifest under outDir."""
    manifest = buildManifest(rendered, baseImage)
    out = Path(outDir)
    out.mkdir(parents=True, exist_ok=True)
    for spec in manifest.specs:
        cdir = out / spec.name
        cdir.mkdir(parents=True, exist_ok=True)
        (cdir / "Dockerfile").write_text(spec.dockerfile())
        (cdir / "start.sh").write_text(spec.startScript())
        for path, content in spec.files:
            target = cdir / "files" / path.lstrip("/")
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(content)
    (out / "docker-compose.yml").write_text(manifest.toYaml())
    manifest.outDir = str(out)
    return manifest


def compileGraph(rendered: RenderedEmulation) -> str:
    """Topology as DOT: a node per machine and per network, clustered by AS."""
    lines = ["graph topology {", "    rankdir=LR;"]

    byAsn: dict[str, list] = {}
    ixNodes = []
    for (scope, _, _), node in rendered.registry.byKind("node"):
        if scope == "ix":
            ixNodes.append(node)
        else:
            byAsn.setdefault(scope, []).append(node)

    asNets: dict[str, list] = {}
    ixNets = []
    for (scope, _, _), net in rendered.registry.byKind("network"):
        if scope == "ix":
            ixNets.append(net)
        else:
            asNets.setdefault(scope, []).append(net)

    def nodeId(node) -> str:
        scope = "ix" if node.role is NodeRole.ROUTE_SERVER else str(node.asn)
        return f"{scope}/{node.name}"

    def netId(net) -> str:
        return f"net:{net.scope}/{net.name}"

    for asn in sorted(byAsn, key=int):
        lines.append(f"    subgraph cluster_as{asn} {{")
        lines.append(f'        label="AS {asn}";')
        for node in sorted(byAsn[asn], key=lambda n: n.name):
            lines.append(
                f'        "{nodeId(node)}" [kind=node, shape=box, label="{node.name}"];'
            )
        for net in sorted(asNets.get(asn, []), key=lambda n: n.name):
            lines.append(
                f'        "{netId(net)}" [kind=net, shape=ellipse, '
                f'label="{net.name}\\n{net.prefix}"];'
            )
        lines.append("    }")

    for node in sorted(ixNodes, key=lambda n: n.name):
        lines.append(f'    "{nodeId(node)}" [kind=node, shape=box, label="{node.name}"];')
    for net in sorted(ixNets, key=lambda n: n.name):
        lines.append(
            f'    "{netId(net)}" [kind=net, shape=ellipse, label="{net.name}\\n{net.prefix}"];'
        )

    for _, node in rendered.registry.byKind("node"):
        for net, addr in node.getInterfaces():
            lines.append(f'    "{nodeId(node)}" -- "{netId(net)}" [label="{addr}"];')

    lines.append("}")
    return "\n".join(lines) + "\n"
