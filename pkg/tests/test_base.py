"""Addressing, exchanges, autonomous systems, remote access."""

import pytest

from inetemu.base import Base, RemoteAccess
from inetemu.core import Emulator, NodeRole
from inetemu.errors import (
    AddressInUse,
    AddressOutOfPrefix,
    DuplicateId,
    DuplicateName,
    EmptyPrefixSource,
    ExplicitAddressRequired,
    ExplicitPrefixRequired,
    IxNetworkNotAllowed,
    PoolExhausted,
    PortInUse,
    PrefixOverlap,
    UnknownNetwork,
    UnknownNode,
)
from inetemu.routing import Routing


def render(base):
    emu = Emulator()
    emu.addLayer(base)
    return emu.render()


class TestExchanges:
    def test_auto_prefix_and_peering_lan(self):
        base = Base()
        ix = base.createInternetExchange(100)
        assert str(ix.getPeeringLan().prefix) == "10.100.0.0/24"
        assert ix.getPeeringLan().name == "ix100"

    def test_large_id_needs_explicit_prefix(self):
        base = Base()
        with pytest.raises(ExplicitPrefixRequired):
            base.createInternetExchange(300)
        ix = base.createInternetExchange(301, prefix="10.200.1.0/24")
        assert str(ix.getPeeringLan().prefix) == "10.200.1.0/24"

    def test_ids_shared_between_as_and_ix(self):
        base = Base()
        base.createInternetExchange(100)
        with pytest.raises(DuplicateId):
            base.createAutonomousSystem(100)
        base.createAutonomousSystem(150)
        with pytest.raises(DuplicateId):
            base.createInternetExchange(150, prefix="10.250.0.0/24")

    def test_router_joins_at_asn_octet(self):
        base = Base()
        base.createInternetExchange(100)
        a = base.createAutonomousSystem(150)
        a.createNetwork("net0")
        a.createRouter("r0").joinNetwork("net0").joinNetwork("ix100")
        node = render(base).getNode(150, "r0")
        assert node.addressOn("ix100") == "10.100.0.150"

    def test_high_asn_needs_explicit_ix_address(self):
        base = Base()
        base.createInternetExchange(100)
        a = base.createAutonomousSystem(11872)
        a.createNetwork("net0", prefix="172.16.0.0/24")
        a.createRouter("r0").joinNetwork("net0")
        with pytest.raises(ExplicitAddressRequired):
            a.getNode("r0").joinNetwork("ix100")
        a.getNode("r0").joinNetwork("ix100", "10.100.0.118")
        assert render(base).getNode(11872, "r0").addressOn("ix100") == "10.100.0.118"

    def test_hosts_cannot_join_exchanges(self):
        base = Base()
        base.createInternetExchange(100)
        a = base.createAutonomousSystem(150)
        a.createNetwork("net0")
        host = a.createHost("h0").joinNetwork("net0")
        with pytest.raises(IxNetworkNotAllowed):
            host.joinNetwork("ix100")

    def test_remote_access_not_on_exchange(self):
        base = Base()
        ix = base.createInternetExchange(100)
        with pytest.raises(IxNetworkNotAllowed):
            ix.getPeeringLan().enableRemoteAccess(RemoteAccess(exposedPort=11940))


class TestAutonomousSystems:
    def test_auto_network_prefixes_count_up(self):
        base = Base()
        a = base.createAutonomousSystem(150)
        assert str(a.createNetwork("net0").prefix) == "10.150.0.0/24"
        assert str(a.createNetwork("net1").prefix) == "10.150.1.0/24"

    def test_large_asn_needs_explicit_net_prefix(self):
        base = Base()
        a = base.createAutonomousSystem(11872)
        with pytest.raises(ExplicitPrefixRequired):
            a.createNetwork("net0")
        net = a.createNetwork("net0", prefix="172.16.0.0/24")
        assert str(net.prefix) == "172.16.0.0/24"

    def test_network_names_starting_ix_reserved(self):
        base = Base()
        a = base.createAutonomousSystem(150)
        with pytest.raises(DuplicateName):
            a.createNetwork("ix0")

    def test_duplicate_names_rejected(self):
        base = Base()
        a = base.createAutonomousSystem(150)
        a.createNetwork("net0")
        with pytest.raises(DuplicateName):
            a.createNetwork("net0")
        a.createHost("n")
        with pytest.raises(DuplicateName):
            a.createRouter("n")

    def test_prefix_overlap_rejected_globally(self):
        base = Base()
        a = base.createAutonomousSystem(150)
        a.createNetwork("net0")
        b = base.createAutonomousSystem(151)
        with pytest.raises(PrefixOverlap):
            b.createNetwork("net0", prefix="10.150.0.128/25")

    def test_unknown_network_join(self):
        base = Base()
        a = base.createAutonomousSystem(150)
        with pytest.raises(UnknownNetwork):
            a.createHost("h0").joinNetwork("nope")

    def test_unknown_node_lookup(self):
        base = Base()
        a = base.createAutonomousSystem(150)
        with pytest.raises(UnknownNode):
            a.getNode("nope")


class TestAddressPools:
    def make(self, hosts=0, routers=0, prefix=None):
        base = Base()
        a = base.createAutonomousSystem(150)
        a.createNetwork("net0", prefix=prefix) if prefix else a.createNetwork("net0")
        for i in range(routers):
            a.createRouter(f"r{i}").joinNetwork("net0")
        for i in range(hosts):
            a.createHost(f"h{i:03d}").joinNetwork("net0")
        return base

    def test_hosts_count_up_from_71(self):
        rendered = render(self.make(hosts=3, routers=1))
        addrs = [rendered.getNode(150, f"h{i:03d}").addressOn("net0") for i in range(3)]
        assert addrs == ["10.150.0.71", "10.150.0.72", "10.150.0.73"]

    def test_routers_count_down_from_254(self):
        rendered = render(self.make(routers=3))
        addrs = [rendered.getNode(150, f"r{i}").addressOn("net0") for i in range(3)]
        assert addrs == ["10.150.0.254", "10.150.0.253", "10.150.0.252"]

    def test_explicit_address_claims(self):
        base = Base()
        a = base.createAutonomousSystem(150)
        a.createNetwork("net0")
        a.createHost("h0").joinNetwork("net0", "10.150.0.99")
        with pytest.raises(AddressInUse):
            a.createHost("h1").joinNetwork("net0", "10.150.0.99")
        with pytest.raises(AddressOutOfPrefix):
            a.createHost("h2").joinNetwork("net0", "10.151.0.5")

    def test_pool_skips_claimed_addresses(self):
        base = Base()
        a = base.createAutonomousSystem(150)
        a.createNetwork("net0")
        a.createHost("h0").joinNetwork("net0", "10.150.0.71")
        a.createHost("h1").joinNetwork("net0")
        assert render(base).getNode(150, "h1").addressOn("net0") == "10.150.0.72"

    def test_host_pool_exhaustion(self):
        base = self.make(prefix="10.150.0.0/29")  # usable .1 through .6
        a = base.getAutonomousSystem(150)
        for i in range(6):
            a.createHost(f"x{i}").joinNetwork("net0")
        with pytest.raises(PoolExhausted):
            a.createHost("x6").joinNetwork("net0")

    def test_small_prefix_router_pool_clamps(self):
        base = Base()
        a = base.createAutonomousSystem(150)
        a.createNetwork("net0", prefix="10.150.0.0/29")  # top usable .6
        a.createRouter("r0").joinNetwork("net0")
        assert render(base).getNode(150, "r0").addressOn("net0") == "10.150.0.6"


class TestRemoteAccess:
    def test_port_uniqueness(self):
        base = Base()
        a = base.createAutonomousSystem(150)
        a.createNetwork("net0").enableRemoteAccess(RemoteAccess(exposedPort=11940))
        b = base.createAutonomousSystem(151)
        with pytest.raises(PortInUse):
            b.createNetwork("net0").enableRemoteAccess(RemoteAccess(exposedPort=11940))


class TestRealWorldRouters:
    def test_static_prefixes(self):
        base = Base()
        base.createInternetExchange(100)
        a = base.createAutonomousSystem(11872)
        a.createRealWorldRouter("rw", prefixes=["128.230.0.0/16"]).joinNetwork(
            "ix100", "10.100.0.118"
        )
        node = render(base).getNode(11872, "rw")
        assert node.role is NodeRole.REAL_WORLD_ROUTER
        assert node.rwPrefixes == ["128.230.0.0/16"]

    def test_empty_static_list_rejected_immediately(self):
        base = Base()
        a = base.createAutonomousSystem(11872)
        with pytest.raises(EmptyPrefixSource):
            a.createRealWorldRouter("rw", prefixes=[])

    def test_prefix_source_callable(self):
        base = Base()
        base.createInternetExchange(100)
        a = base.createAutonomousSystem(3)
        a.createRealWorldRouter("rw", prefixSource=lambda asn: [f"192.0.{asn}.0/24"])
        a.getNode("rw").joinNetwork("ix100")
        node = render(base).getNode(3, "rw")
        assert node.rwPrefixes == ["192.0.3.0/24"]

    def test_provider_hook_used_at_render(self):
        base = Base()
        base.createInternetExchange(100)
        base.setRealWorldPrefixProvider(lambda asn: [f"198.51.{asn}.0/24"])
        a = base.createAutonomousSystem(3)
        a.createRealWorldRouter("rw").joinNetwork("ix100")
        node = render(base).getNode(3, "rw")
        assert node.rwPrefixes == ["198.51.3.0/24"]

    def test_no_source_at_all_fails_render(self):
        base = Base()
        base.createInternetExchange(100)
        a = base.createAutonomousSystem(3)
        a.createRealWorldRouter("rw").joinNetwork("ix100")
        emu = Emulator()
        emu.addLayer(base)
        with pytest.raises(EmptyPrefixSource):
            emu.render()


class TestRouteServers:
    def test_route_server_takes_router_pool_address(self):
        from inetemu.routing import Ebgp, PeerRelationship

        base = Base()
        base.createInternetExchange(100)
        for asn in (150, 151):
            a = base.createAutonomousSystem(asn)
            a.createNetwork("net0")
            a.createRouter("r0").joinNetwork("net0").joinNetwork("ix100")
            a.createHost("h0").joinNetwork("net0")
        ebgp = Ebgp()
        ebgp.addRsPeers(100, [150, 151])
        emu = Emulator()
        emu.addLayer(base)
        emu.addLayer(Routing())
        emu.addLayer(ebgp)
        rendered = emu.render()
        rs = rendered.getNode("ix", "rs100")
        assert rs.role is NodeRole.ROUTE_SERVER
        assert rs.addressOn("ix100") == "10.100.0.254"
