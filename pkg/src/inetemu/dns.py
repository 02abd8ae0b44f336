"""Domain name service layer.

Zones form a tree rooted at ".".  Nameservers are virtual nodes; bindings
decide which hosts carry them.  Zone files are emitted in master-file syntax
under /etc/zones/ on the effective master of each zone, with parent-side NS
and glue records synthesized for every delegation.
"""

from __future__ import annotations

import ipaddress
import re
from typing import Optional

from .core import Layer, RenderContext, VirtualNode, registerLayerType
from .errors import (
    MalformedFqdn,
    OrphanZone,
    SecondMaster,
    UnboundNameserver,
    UnparseableRecord,
)

RECORD_TYPES = {"A", "NS", "CNAME", "MX", "TXT"}
ZONE_TTL = 300
ZONE_DIR = "/etc/zones"

_LABEL = re.compile(r"^[a-z0-9_]([a-z0-9_-]*[a-z0-9_])?$")


def _normalizeFqdn(fqdn: str) -> str:
    if not isinstance(fqdn, str) or fqdn == "":
        raise MalformedFqdn(f"bad fqdn: {fqdn!r}")
    fqdn = fqdn.lower()
    if fqdn == ".":
        return fqdn
    if not fqdn.endswith("."):
        raise MalformedFqdn(f"fqdn must end with a dot: {fqdn!r}")
    labels = fqdn[:-1].split(".")
    for label in labels:
        if not _LABEL.match(label):
            raise MalformedFqdn(f"bad label {label!r} in {fqdn!r}")
    return fqdn


def _nsHostname(vname: str, zoneFqdn: str) -> str:
    if zoneFqdn == ".":
        return f"{vname}."
    return f"{vname}.{zoneFqdn}"


class Zone:
    def __init__(self, fqdn: str, parent: Optional["Zone"]):
        self.fqdn = fqdn
        self.parent = parent
        self.children: dict[str, Zone] = {}
        self.records: list[str] = []
        self.nameservers: list[str] = []
        self.master: Optional[str] = None

    def addRecord(self, line: str):
        """Add a record as "<owner> <type> <rdata>"; chainable."""
        parts = line.split(None, 2)
        if len(parts) != 3:
            raise UnparseableRecord(f"expected '<owner> <type> <rdata>': {line!r}")
        owner, rtype, rdata = parts
        if rtype not in RECORD_TYPES:
            raise UnparseableRecord(f"unsupported record type {rtype!r} in {line!r}")
        if rtype == "A":
            try:
                ipaddress.IPv4Address(rdata.strip())
            except ValueError:
                raise UnparseableRecord(f"bad A rdata in {line!r}") from None
        self.records.append(f"{owner} {rtype} {rdata}")
        return self

    def getRecords(self) -> list[str]:
        return list(self.records)

    @property
    def label(self) -> str:
        if self.fqdn == ".":
            return ""
        return self.fqdn[:-1].split(".")[0]

    def effectiveMaster(self) -> Optional[str]:
        if self.master is not None:
            return self.master
        return self.nameservers[0] if self.nameservers else None

    def walk(self):
        yield self
        for label in sorted(self.children):
            yield from self.children[label].walk()


class NameserverAssignment:
    """Chainable handle tying a virtual node to zones it serves."""

    def __init__(self, layer: "DomainNameService", vname: str):
        self._layer = layer
        self.vname = vname
        self.zoneFqdns: list[str] = []
        self._lastZone: Optional[Zone] = None

    def addZone(self, fqdn: str):
        zone = self._layer.getZone(fqdn)
        if self.vname not in zone.nameservers:
            zone.nameservers.append(self.vname)
        if fqdn not in self.zoneFqdns:
            self.zoneFqdns.append(zone.fqdn)
        self._lastZone = zone
        return self

    def setMaster(self):
        zone = self._lastZone
        if zone is None:
            raise OrphanZone(f"{self.vname}: setMaster before addZone")
        if zone.master is not None and zone.master != self.vname:
            raise SecondMaster(
                f"zone {zone.fqdn} already has master {zone.master}"
            )
        zone.master = self.vname
        return self


class DomainNameService(Layer):
    """DNS layer: install nameservers on virtual nodes and declare zones."""

    name = "dns"
    kind = "service"
    rank = 30
    typeName = "dns"

    def __init__(self):
        super().__init__()
        self.root = Zone(".", None)
        self._assignments: dict[str, NameserverAssignment] = {}
        self._vnodes: dict[str, VirtualNode] = {}

    def install(self, vname: str) -> NameserverAssignment:
        """Declare a nameserver on the named virtual node; chainable."""
        self._assertMutable()
        if vname not in self._assignments:
            self._assignments[vname] = NameserverAssignment(self, vname)
            template = VirtualNode(vname)
            template.addSoftware("bind9")
            template.appendStartCommand("named -c /etc/bind/named.conf &")
            self._vnodes[vname] = template
        return self._assignments[vname]

    def getZone(self, fqdn: str) -> Zone:
        """Fetch a zone, creating it and any missing ancestors."""
        self._assertMutable()
        fqdn = _normalizeFqdn(fqdn)
        if fqdn == ".":
            return self.root
        labels = fqdn[:-1].split(".")
        zone = self.root
        path = ""
        for label in reversed(labels):
            path = f"{label}.{path}" if path else f"{label}."
            if label not in zone.children:
                zone.children[label] = Zone(path, zone)
            zone = zone.children[label]
        return zone

    def zones(self) -> list[Zone]:
        return list(self.root.walk())

    def _usedZones(self) -> list[Zone]:
        """Zones that carry data plus every ancestor up to the root."""
        marked: set[int] = set()
        for zone in self.root.walk():
            if zone.nameservers or zone.records:
                cursor: Optional[Zone] = zone
                while cursor is not None and id(cursor) not in marked:
                    marked.add(id(cursor))
                    cursor = cursor.parent
        return [z for z in self.root.walk() if id(z) in marked]

    def getVirtualNodes(self) -> dict[str, VirtualNode]:
        return dict(self._vnodes)

    # render

    def render(self, ctx: RenderContext):
        used = self._usedZones()
        if not used:
            return
        for zone in used:
            if not zone.nameservers:
                raise OrphanZone(f"zone {zone.fqdn} has no nameserver")
        for vname in self._assignments:
            if vname not in ctx.resolvedBindings:
                raise UnboundNameserver(f"nameserver {vname} is not bound to a node")

        serial = ctx.renderCounter
        glue = {
            vname: ctx.resolvedBindings[vname].interfaces[0].address
            for vname in self._assignments
        }

        zoneStanzas: dict[str, list[str]] = {v: [] for v in self._assignments}
        for zone in used:
            content = self._zoneFile(zone, serial, glue)
            fileName = f"{ZONE_DIR}/{zone.fqdn}zone"
            master = zone.effectiveMaster()
            masterAddr = glue[master]
            for vname in zone.nameservers:
                node = ctx.resolvedBindings[vname]
                if vname == master:
                    node.setFile(content, fileName)
                    zoneStanzas[vname].append(
                        f'zone "{zone.fqdn}" {{ type master; file "{fileName}"; }};'
                    )
                else:
                    zoneStanzas[vname].append(
                        f'zone "{zone.fqdn}" {{ type slave; masters {{ {masterAddr}; }}; '
                        f'file "{fileName}.slave"; }};'
                    )

        for vname, stanzas in zoneStanzas.items():
            node = ctx.resolvedBindings[vname]
            conf = [
                "options {",
                f'    directory "{ZONE_DIR}";',
                "    recursion no;",
                "    allow-query { any; };",
                "    allow-transfer { any; };",
                "};",
                "",
                *stanzas,
            ]
            node.setFile("\n".join(conf) + "\n", "/etc/bind/named.conf")

    def _zoneFile(self, zone: Zone, serial: int, glue: dict[str, str]) -> str:
        masterHost = _nsHostname(zone.effectiveMaster(), zone.fqdn)
        admin = "admin." if zone.fqdn == "." else f"admin.{zone.fqdn}"
        lines = [
            f"$TTL {ZONE_TTL}",
            f"@ IN SOA {masterHost} {admin} {serial} 3600 600 86400 {ZONE_TTL}",
        ]
        for vname in zone.nameservers:
            lines.append(f"@ IN NS {_nsHostname(vname, zone.fqdn)}")
        for vname in zone.nameservers:
            lines.append(f"{_nsHostname(vname, zone.fqdn)} IN A {glue[vname]}")
        for label in sorted(zone.children):
            child = zone.children[label]
            for vname in child.nameservers:
                host = _nsHostname(vname, child.fqdn)
                lines.append(f"{label} IN NS {host}")
                lines.append(f"{host} IN A {glue[vname]}")
        lines.extend(zone.records)
        return "\n".join(lines) + "\n"

    # component round trip

    def describe(self) -> dict:
        return {
            "type": self.typeName,
            "name": self.name,
            "dependsOn": sorted(self.dependsOn),
            "zones": [z.fqdn for z in self.root.walk()],
            "nameservers": [
                {"vnode": a.vname, "zones": list(a.zoneFqdns)}
                for a in self._assignments.values()
            ],
            "masters": {
                z.fqdn: z.master for z in self.root.walk() if z.master is not None
            },
            "records": {z.fqdn: z.getRecords() for z in self.root.walk() if z.records},
        }

    @classmethod
    def restore(cls, doc: dict) -> "DomainNameService":
        layer = cls()
        for dep in doc.get("dependsOn", []):
            layer.addDependency(dep)
        for fqdn in doc.get("zones", []):
            if fqdn != ".":
                layer.getZone(fqdn)
        for entry in doc.get("nameservers", []):
            assignment = layer.install(entry["vnode"])
            for fqdn in entry["zones"]:
                assignment.addZone(fqdn)
        for fqdn, master in doc.get("masters", {}).items():
            zone = layer.getZone(fqdn)
            zone.master = master
        for fqdn, records in doc.get("records", {}).items():
            zone = layer.getZone(fqdn)
            for line in records:
                zone.addRecord(line)
        return layer


registerLayerType(DomainNameService.typeName, DomainNameService)
