"""End-to-end gate: one printed pass/fail line per criterion.

Run with plain pytest; the lines print outside capture so they always show.
"""

import ast
import hashlib
import inspect
import json
import textwrap
import time
from collections import Counter
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from inetemu import fixtures
from inetemu.analysis import ControlPlaneModel, computeRibs, whatIfAnnounce
from inetemu.base import Base
from inetemu.compilers import buildManifest, compileContainers
from inetemu.core import Emulator
from inetemu.fixtures import dnsDemo, hijackDemo, largeDemo, scaleDemo
from inetemu.mapd import Mapd, createApp
from inetemu.routing import Routing

from oracles import collectZoneFiles, floodRoutes, isValleyFree, resolveName
from topogen import randomTopology


def emit(capsys, name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    with capsys.disabled():
        print(line, flush=True)
    assert ok, line


def test_dns_hierarchy(capsys):
    t0 = time.monotonic()
    try:
        rendered = dnsDemo().render()
        zones = collectZoneFiles(rendered)
        example = zones["example.com."].splitlines()
        com = zones["com."]
        recordsOk = (
            "@ A 2.2.2.2" in example
            and "www A 5.5.5.5" in example
            and "xyz A 5.5.5.6" in example
        )
        delegationOk = (
            "example IN NS ns-example-com.example.com." in com
            and any(
                l.startswith("ns-example-com.example.com. IN A ")
                for l in com.splitlines()
            )
        )
        resolvedOk = (
            resolveName(rendered, "www.example.com.") == {"5.5.5.5"}
            and resolveName(rendered, "xyz.example.com.") == {"5.5.5.6"}
            and resolveName(rendered, "example.com.") == {"2.2.2.2"}
        )
        elapsed = time.monotonic() - t0
        ok = recordsOk and delegationOk and resolvedOk and elapsed < 5.0
        detail = (
            f"records={recordsOk} delegation={delegationOk} "
            f"resolution={resolvedOk} elapsed={elapsed:.2f}s (limit 5s)"
        )
    except Exception as e:
        ok, detail = False, f"error: {e!r}"
    emit(capsys, "dns hierarchy renders and resolves", ok, detail)


def test_large_topology_compiles(capsys):
    t0 = time.monotonic()
    try:
        rendered = largeDemo().render()
        manifest = buildManifest(rendered)
        hosts = sum(1 for s in manifest.specs if s.role == "host")
        total = len(manifest.specs)
        src = textwrap.dedent(inspect.getsource(fixtures.largeDemo))
        statements = sum(isinstance(n, ast.stmt) for n in ast.walk(ast.parse(src)))
        elapsed = time.monotonic() - t0
        ok = hosts == 240 and total == 275 and statements <= 100 and elapsed < 30.0
        detail = (
            f"hosts={hosts} (want 240) containers={total} (want 275) "
            f"builderStatements={statements} (limit 100) elapsed={elapsed:.2f}s (limit 30s)"
        )
    except Exception as e:
        ok, detail = False, f"error: {e!r}"
    emit(capsys, "large topology from a small builder", ok, detail)


def test_scaling(capsys):
    t0 = time.monotonic()
    try:
        rendered = scaleDemo(count=1000, perExchange=5).render()
        asns = {n.asn for n in rendered.getNodes() if n.role.value != "rs"}
        ixNets = [n for n in rendered.getNetworks() if n.scope == "ix"]
        perAs = Counter()
        for s in rendered.ebgpSessions():
            perAs[s.leftAsn] += 1
            perAs[s.rightAsn] += 1
        elapsed = time.monotonic() - t0
        ok = (
            len(asns) == 1000
            and len(ixNets) == 200
            and set(perAs.values()) == {4}
            and len(perAs) == 1000
            and elapsed < 120.0
        )
        detail = (
            f"ases={len(asns)} (want 1000) exchanges={len(ixNets)} (want 200) "
            f"sessionsPerAs={sorted(set(perAs.values()))} (want [4]) "
            f"elapsed={elapsed:.2f}s (limit 120s)"
        )
    except Exception as e:
        ok, detail = False, f"error: {e!r}"
    emit(capsys, "thousand-AS render stays fast", ok, detail)


def test_ibgp_mesh_sizes(capsys):
    try:
        got = {}
        for n in (1, 2, 5, 10):
            emu = Emulator()
            base, routing = Base(), Routing()
            asys = base.createAutonomousSystem(2)
            asys.createNetwork("net0")
            for i in range(n):
                asys.createRouter(f"r{i}").joinNetwork("net0")
            asys.createHost("h0").joinNetwork("net0")
            emu.addLayer(base)
            emu.addLayer(routing)
            meshes = emu.render().ibgpMeshes()
            got[n] = sum(len(m.sessionPairs) for m in meshes.values())
        want = {n: n * (n - 1) // 2 for n in got}
        ok = got == want
        detail = f"sessions={got} (want {want})"
    except Exception as e:
        ok, detail = False, f"error: {e!r}"
    emit(capsys, "ibgp full mesh n(n-1)/2", ok, detail)


def test_analyzer_matches_oracle(capsys):
    t0 = time.monotonic()
    try:
        mismatches = 0
        valleyViolations = 0
        for seed in range(100):
            emu, _ = randomTopology(seed, maxAs=5)
            model = ControlPlaneModel.fromRendered(emu.render())
            got = computeRibs(model).selected
            want = floodRoutes(model)
            for asn in model.asns:
                g = {
                    p: (r.cls, r.path, -1 if r.ix is None else r.ix)
                    for p, r in got.get(asn, {}).items()
                }
                w = {
                    p: (c.cls, c.path, c.ix) for p, c in want.get(asn, {}).items()
                }
                if g != w:
                    mismatches += 1
                for p, r in got.get(asn, {}).items():
                    if not isValleyFree([asn, *r.path], model):
                        valleyViolations += 1
        elapsed = time.monotonic() - t0
        ok = mismatches == 0 and valleyViolations == 0 and elapsed < 10.0
        detail = (
            f"seeds=100 mismatches={mismatches} valleyViolations={valleyViolations} "
            f"elapsed={elapsed:.2f}s (limit 10s)"
        )
    except Exception as e:
        ok, detail = False, f"error: {e!r}"
    emit(capsys, "static analyzer equals exhaustive oracle", ok, detail)


def test_hijack_what_if(capsys):
    try:
        model = ControlPlaneModel.fromRendered(hijackDemo().render())
        before = computeRibs(model)
        diff = whatIfAnnounce(model, 199, "10.160.0.0/25")
        flipped = diff.flippedTo(199)
        allFlip = flipped == sorted(model.asns)
        after = computeRibs(model)
        restored = all(
            [e.describe() for e in before.entriesFor(a)]
            == [e.describe() for e in after.entriesFor(a)]
            for a in model.asns
        )
        ok = allFlip and restored
        detail = (
            f"flipped={len(flipped)}/{len(model.asns)} ASes (want all) "
            f"bitExactRestore={restored}"
        )
    except Exception as e:
        ok, detail = False, f"error: {e!r}"
    emit(capsys, "more-specific hijack flips every AS", ok, detail)


def treeDigest(root: Path) -> str:
    h = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            h.update(str(path.relative_to(root)).encode())
            h.update(path.read_bytes())
    return h.hexdigest()


def test_deterministic_builds(capsys, tmp_path):
    try:
        compileContainers(largeDemo().render(), str(tmp_path / "a"))
        compileContainers(largeDemo().render(), str(tmp_path / "b"))
        da, db = treeDigest(tmp_path / "a"), treeDigest(tmp_path / "b")
        ok = da == db
        detail = f"sha256(a)={da[:16]} sha256(b)={db[:16]} identical={ok}"
    except Exception as e:
        ok, detail = False, f"error: {e!r}"
    emit(capsys, "same seed, byte-identical build tree", ok, detail)


def test_map_backend_offline(capsys, tmp_path):
    try:
        out = tmp_path / "manifest"
        compileContainers(largeDemo().render(), str(out))
        mapd = Mapd(mode="offline", manifestDir=str(out))
        with TestClient(createApp(mapd)) as client:
            nodes = len(client.get("/api/topology").json()["nodes"])

            client.post("/api/recordings", json={"action": "start"})
            client.post(
                "/api/events",
                json={
                    "events": [
                        {"nodeId": "as150h-host0", "summary": f"pkt {i}"}
                        for i in range(20)
                    ]
                },
            )
            rid = client.post("/api/recordings", json={"action": "stop"}).json()["id"]

            with client.websocket_connect("/ws/events") as ws:
                client.post("/api/replay", json={"id": rid, "intervalMs": 100})
                stamps, summaries = [], []
                for _ in range(20):
                    doc = json.loads(ws.receive_text())
                    stamps.append(time.monotonic())
                    summaries.append(doc["summary"])
        span = stamps[-1] - stamps[0]
        ordered = summaries == [f"pkt {i}" for i in range(20)]
        ok = nodes == 275 and ordered and span >= 1.9
        detail = (
            f"nodes={nodes} (want 275) ordered={ordered} "
            f"replaySpan={span:.2f}s (floor 1.9s)"
        )
    except Exception as e:
        ok, detail = False, f"error: {e!r}"
    emit(capsys, "map backend serves manifests and paced replay", ok, detail)
