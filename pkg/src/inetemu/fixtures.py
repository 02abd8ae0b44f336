"""Ready-made topologies for demos, tests and the command line."""

from __future__ import annotations

from .base import Base, RemoteAccess
from .core import Action, Binding, Emulator, Filter
from .dns import DomainNameService
from .routing import Ebgp, PeerRelationship, Routing


def dnsDemo() -> Emulator:
    """Small provider tree carrying a root/com/edu zone hierarchy."""
    emu = Emulator(seed=3)
    base, routing, ebgp = Base(), Routing(), Ebgp()
    dns = DomainNameService()

    base.createInternetExchange(100)
    base.createInternetExchange(101)
    transit = base.createAutonomousSystem(2)
    transit.createNetwork("net0")
    transit.createRouter("r0").joinNetwork("ix100").joinNetwork("net0")
    transit.createRouter("r1").joinNetwork("net0").joinNetwork("ix101")

    stubs = {150: 100, 151: 100, 152: 101, 153: 101, 154: 100, 160: 101, 161: 101, 171: 100}
    for asn, ix in stubs.items():
        asys = base.createAutonomousSystem(asn)
        asys.createNetwork("net0")
        asys.createRouter("router0").joinNetwork("net0").joinNetwork(f"ix{ix}")
        asys.createHost("host0").joinNetwork("net0")
        asys.createHost("host1").joinNetwork("net0")
        ebgp.addPrivatePeerings(ix, [2], [asn], PeerRelationship.Provider)

    dns.install("root-a").addZone(".").setMaster()
    dns.install("root-b").addZone(".")
    dns.install("com-a").addZone("com.").setMaster()
    dns.install("com-b").addZone("com.")
    dns.install("edu").addZone("edu.")
    dns.install("ns-example-com").addZone("example.com.")
    dns.install("ns-syr-edu").addZone("syr.edu.")
    dns.install("ns-google-com").addZone("google.com.")
    dns.getZone("example.com.").addRecord("@ A 2.2.2.2").addRecord(
        "www A 5.5.5.5"
    ).addRecord("xyz A 5.5.5.6")

    for layer in (base, routing, ebgp, dns):
        emu.addLayer(layer)
    for vname, asn in {
        "root-a": 171,
        "root-b": 150,
        "com-a": 151,
        "com-b": 153,
        "edu": 154,
        "ns-example-com": 160,
        "ns-google-com": 161,
        "ns-syr-edu": 152,
    }.items():
        emu.addBinding(Binding(vname, Filter(asn=asn)))
    return emu


def largeDemo() -> Emulator:
    """Five exchanges, four transit backbones, twelve stub ASes of 20 hosts."""
    emu = Emulator(seed=7)
    base, routing, ebgp = Base(), Routing(), Ebgp()
    ixIds = [100, 101, 102, 103, 104]
    for ix in ixIds:
        base.createInternetExchange(ix)
    transitPlan = {
        2: ixIds,
        3: [100, 101, 102, 103],
        4: [101, 102, 103, 104],
        5: ixIds,
    }
    for asn, ixes in transitPlan.items():
        asys = base.createAutonomousSystem(asn)
        for i in range(len(ixes) - 1):
            asys.createNetwork(f"net{i}")
        for i, ix in enumerate(ixes):
            router = asys.createRouter(f"r{i}").joinNetwork(f"ix{ix}")
            if i > 0:
                router.joinNetwork(f"net{i - 1}")
            if i < len(ixes) - 1:
                router.joinNetwork(f"net{i}")
    stubPlan = {
        100: [150, 151],
        101: [152, 153, 154],
        102: [155, 156],
        103: [157, 158, 159],
        104: [160, 161],
    }
    for ix, members in stubPlan.items():
        for asn in members:
            asys = base.createAutonomousSystem(asn)
            asys.createNetwork("net0")
            asys.createRouter("router0").joinNetwork("net0").joinNetwork(f"ix{ix}")
            for h in range(20):
                asys.createHost(f"host{h}").joinNetwork("net0")
    for ix in ixIds:
        transitsHere = [asn for asn, ixes in transitPlan.items() if ix in ixes]
        ebgp.addRsPeers(ix, transitsHere)
        for t in transitsHere:
            ebgp.addPrivatePeerings(ix, [t], stubPlan[ix], PeerRelationship.Provider)
    for layer in (base, routing, ebgp):
        emu.addLayer(layer)
    return emu


def scaleDemo(count: int = 1000, perExchange: int = 5) -> Emulator:
    """count single-router ASes, fully meshed in groups at one exchange each."""
    emu = Emulator(seed=11)
    base, routing, ebgp = Base(), Routing(), Ebgp()
    groups = count // perExchange
    for g in range(groups):
        ixId = 2000 + g
        base.createInternetExchange(ixId, prefix=f"10.{200 + g // 250}.{g % 250}.0/24")
        members = []
        for slot in range(perExchange):
            asn = 2 + g * perExchange + slot
            asys = base.createAutonomousSystem(asn)
            asys.createNetwork("net0", prefix=f"172.{16 + (asn - 2) // 256}.{(asn - 2) % 256}.0/24")
            asys.createRouter("r0").joinNetwork("net0").joinNetwork(
                f"ix{ixId}", f"10.{200 + g // 250}.{g % 250}.{11 + slot}"
            )
            members.append(asn)
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                ebgp.addPrivatePeerings(ixId, [members[i]], [members[j]], PeerRelationship.Unfiltered)
    for layer in (base, routing, ebgp):
        emu.addLayer(layer)
    return emu


def hijackDemo() -> Emulator:
    """Six ASes: a victim stub, an attacker stub, two transits, two sources."""
    emu = Emulator(seed=5)
    base, routing, ebgp = Base(), Routing(), Ebgp()
    for ix in (100, 101, 102):
        base.createInternetExchange(ix)
    plans = {
        2: [100, 101],  # transit one
        3: [100, 102],  # transit two
        160: [101],  # victim
        151: [101],  # source behind transit one
        199: [102],  # attacker
        150: [102],  # source behind transit two
    }
    for asn, ixes in plans.items():
        asys = base.createAutonomousSystem(asn)
        asys.createNetwork("net0")
        router = asys.createRouter("r0").joinNetwork("net0")
        for ix in ixes:
            router.joinNetwork(f"ix{ix}")
        asys.createHost("host0").joinNetwork("net0")
    ebgp.addPrivatePeerings(100, [2], [3], PeerRelationship.Peer)
    ebgp.addPrivatePeerings(101, [2], [160, 151], PeerRelationship.Provider)
    ebgp.addPrivatePeerings(102, [3], [199, 150], PeerRelationship.Provider)
    for layer in (base, routing, ebgp):
        emu.addLayer(layer)
    return emu


def realWorldDemo() -> Emulator:
    """A router that NATs out of the emulation and announces real prefixes."""
    emu = Emulator(seed=9)
    base, routing, ebgp = Base(), Routing(), Ebgp()
    base.createInternetExchange(102)
    transit = base.createAutonomousSystem(2)
    transit.createNetwork("net0")
    transit.createRouter("r0").joinNetwork("net0").joinNetwork("ix102")
    transit.createHost("host0").joinNetwork("net0")
    stub = base.createAutonomousSystem(150)
    stub.createNetwork("net0")
    stub.createRouter("r0").joinNetwork("net0").joinNetwork("ix102")
    stub.createHost("host0").joinNetwork("net0")
    rw = base.createAutonomousSystem(11872)
    rw.createRealWorldRouter("rw", prefixes=["128.230.0.0/16"]).joinNetwork(
        "ix102", "10.102.0.118"
    )
    ebgp.addPrivatePeerings(102, [2], [150], PeerRelationship.Provider)
    ebgp.addPrivatePeerings(102, [2], [11872], PeerRelationship.Provider)
    for layer in (base, routing, ebgp):
        emu.addLayer(layer)
    return emu


def accessDemo() -> Emulator:
    """Stub AS with a remote-access entry point on its internal network."""
    emu = Emulator(seed=13)
    base, routing = Base(), Routing()
    asys = base.createAutonomousSystem(152)
    net = asys.createNetwork("net0")
    asys.createRouter("r0").joinNetwork("net0")
    asys.createHost("host0").joinNetwork("net0")
    net.enableRemoteAccess(RemoteAccess(exposedPort=11940))
    emu.addLayer(base)
    emu.addLayer(routing)
    return emu


def botMixin(emu: Emulator, asList: list[int], count: int = 10) -> Emulator:
    """Attach freshly created, randomly placed hosts via NEW bindings."""
    for i in range(count):
        name = f"bot-node-{i:02d}"
        emu.addBinding(Binding(name, Filter(asn=asList[i % len(asList)]), Action.NEW))
    return emu


FIXTURES = {
    "dns-demo": dnsDemo,
    "large-demo": largeDemo,
    "scale-demo": scaleDemo,
    "hijack-demo": hijackDemo,
    "real-world-demo": realWorldDemo,
    "access-demo": accessDemo,
}
