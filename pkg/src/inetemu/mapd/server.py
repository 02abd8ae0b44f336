"""HTTP and websocket surface of the map backend.

Offline mode serves a compiled manifest and scripted events; live mode reads
container labels from the runtime and attaches packet captures and consoles.
Configuration comes from MAPD_MODE, MAPD_PORT, MAPD_RUNTIME_SOCKET,
MAPD_MANIFEST and MAPD_STATIC_DIR.
"""

from __future__ import annotations

import asyncio
import json
import os
import queue
import re
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..errors import (
    FilterRejected,
    NodeNotRunning,
    OfflineMode,
    UnknownRecording,
)
from .capfilter import evalFilter, parseFilter
from .console import ConsoleBridge
from .events import EventBus, Recorder, SniffEvent, scheduleReplay
from .topology import TopologyDocument, loadTopology, topologyFromContainers

DEFAULT_PORT = 8080
DEFAULT_SOCKET = "/var/run/docker.sock"

_TCPDUMP_LINE = re.compile(
    r"(?P<src>\d+\.\d+\.\d+\.\d+)(?:\.(?P<sport>\d+))?\s+>\s+"
    r"(?P<dst>\d+\.\d+\.\d+\.\d+)(?:\.(?P<dport>\d+))?"
)


def parseCaptureLine(nodeId: str, line: str) -> SniffEvent:
    """Turn one capture-process output line into an event."""
    proto = None
    lowered = line.lower()
    for candidate in ("icmp", "udp", "arp", "tcp"):
        if re.search(rf"\b{candidate}\b", lowered):
            proto = candidate
            break
    src = dst = None
    sport = dport = None
    m = _TCPDUMP_LINE.search(line)
    if m:
        src, dst = m.group("src"), m.group("dst")
        sport = int(m.group("sport")) if m.group("sport") else None
        dport = int(m.group("dport")) if m.group("dport") else None
    return SniffEvent(
        nodeId=nodeId,
        summary=line.strip(),
        proto=proto,
        src=src,
        dst=dst,
        sport=sport,
        dport=dport,
    )


class Mapd:
    """State shared by the API routes."""

    def __init__(
        self,
        mode: str = "offline",
        manifestDir: Optional[str] = None,
        runtimeSocket: str = DEFAULT_SOCKET,
        staticDir: Optional[str] = None,
        maxQueueSize: int = 512,
    ):
        if mode not in ("offline", "live"):
            raise ValueError(f"bad mode {mode!r}")
        self.mode = mode
        self.manifestDir = manifestDir
        self.runtimeSocket = runtimeSocket
        self.staticDir = staticDir
        self.bus = EventBus(maxQueueSize=maxQueueSize)
        self.recorder = Recorder()
        self.bus.attachRecorder(self.recorder)
        self.filterExpr: Optional[str] = None
        self._filterTree = None
        self.topology = TopologyDocument()
        self._captures: list[asyncio.subprocess.Process] = []
        if mode == "offline" and manifestDir:
            self.topology = loadTopology(manifestDir)

    # topology

    def refreshTopology(self) -> TopologyDocument:
        if self.mode == "offline":
            if self.manifestDir:
                self.topology = loadTopology(self.manifestDir)
        else:
            self.topology = topologyFromContainers(self._listContainers())
        return self.topology

    def _listContainers(self) -> list[dict]:
        import httpx

        transport = httpx.HTTPTransport(uds=self.runtimeSocket)
        with httpx.Client(transport=transport, base_url="http://runtime") as client:
            resp = client.get("/containers/json")
            resp.raise_for_status()
            return resp.json()

    # filtering and events

    def setFilter(self, expr: str) -> str:
        """Validate and apply a capture filter; raises FilterRejected."""
        tree = parseFilter(expr)
        self.filterExpr = expr
        self._filterTree = tree
        return expr

    def clearFilter(self):
        self.filterExpr = None
        self._filterTree = None

    def accept(self, event: SniffEvent) -> bool:
        if self._filterTree is None:
            return True
        return evalFilter(self._filterTree, event.toJson())

    def publish(self, event: SniffEvent) -> bool:
        """Publish through the filter; returns whether the event passed."""
        if not self.accept(event):
            return False
        self.bus.publish(event)
        return True

    def injectEvents(self, docs: list[dict]) -> int:
        accepted = 0
        for doc in docs:
            if self.publish(SniffEvent.fromDict(doc)):
                accepted += 1
        return accepted

    # recordings

    def startRecording(self) -> str:
        return self.recorder.start()

    def stopRecording(self) -> Optional[str]:
        return self.recorder.stop()

    def replay(self, recordingId: str, intervalMs: int):
        """Start a paced replay in the background; resolves when done."""
        recording = self.recorder.get(recordingId)
        return scheduleReplay(self.bus, recording, intervalMs)

    # console

    def attachConsole(self, nodeId: str) -> ConsoleBridge:
        if self.mode != "live":
            raise OfflineMode("consoles need a live runtime")
        if self.topology.nodes and self.topology.node(nodeId) is None:
            raise NodeNotRunning(f"no such node {nodeId}")
        return ConsoleBridge(nodeId)

    # live captures

    async def startCaptures(self):
        if self.mode != "live":
            return
        expr = self.filterExpr or "ip"
        for node in self.topology.nodes:
            proc = await asyncio.create_subprocess_exec(
                "docker",
                "exec",
                node.id,
                "tcpdump",
                "-l",
                "-n",
                expr,
                stdout=asyncio.subprocess.PIPE,
                stderr=asyncio.subprocess.DEVNULL,
            )
            self._captures.append(proc)
            asyncio.create_task(self._pumpCapture(node.id, proc))

    async def _pumpCapture(self, nodeId: str, proc):
        while True:
            line = await proc.stdout.readline()
            if not line:
                break
            self.bus.publish(parseCaptureLine(nodeId, line.decode(errors="replace")))

    async def stopCaptures(self):
        for proc in self._captures:
            if proc.returncode is None:
                proc.kill()
        self._captures.clear()


def createApp(mapd: Mapd) -> FastAPI:
    app = FastAPI(title="emulation map backend")
    app.state.mapd = mapd

    @app.get("/api/topology")
    def topology():
        return mapd.topology.toJson()

    @app.get("/api/nodes/{nodeId}")
    def nodeInfo(nodeId: str):
        node = mapd.topology.node(nodeId)
        if node is None:
            return JSONResponse({"error": f"no node {nodeId}"}, status_code=404)
        return node.toJson()

    @app.get("/api/health")
    def health():
        return {
            "mode": mapd.mode,
            "nodes": len(mapd.topology.nodes),
            "filter": mapd.filterExpr,
            "droppedEvents": mapd.bus.droppedTotal(),
            "recordings": mapd.recorder.ids(),
        }

    @app.post("/api/filter")
    def setFilter(body: dict):
        expr = body.get("expr", "")
        try:
            mapd.setFilter(expr)
        except FilterRejected as e:
            return JSONResponse({"error": str(e)}, status_code=400)
        return {"ok": True, "expr": expr}

    @app.post("/api/recordings")
    def recordings(body: dict):
        action = body.get("action")
        if action == "start":
            return {"id": mapd.startRecording(), "state": "recording"}
        if action == "stop":
            rid = mapd.stopRecording()
            if rid is None:
                return JSONResponse({"error": "no active recording"}, status_code=400)
            return {"id": rid, "state": "stopped", "events": len(mapd.recorder.get(rid).events)}
        return JSONResponse({"error": f"bad action {action!r}"}, status_code=400)

    @app.post("/api/replay")
    async def replay(body: dict):
        rid = body.get("id", "")
        intervalMs = int(body.get("intervalMs", 100))
        try:
            recording = mapd.recorder.get(rid)
        except UnknownRecording as e:
            return JSONResponse({"error": str(e)}, status_code=404)
        mapd.replay(rid, intervalMs)
        return {"ok": True, "id": rid, "events": len(recording.events), "intervalMs": intervalMs}

    @app.post("/api/events")
    def inject(body: dict):
        if mapd.mode != "offline":
            return JSONResponse({"error": "event injection is offline-only"}, status_code=409)
        docs = body.get("events", [])
        return {"accepted": mapd.injectEvents(docs)}

    @app.websocket("/ws/events")
    async def wsEvents(websocket: WebSocket):
        await websocket.accept()
        sid, eventQueue = mapd.bus.subscribe()
        try:
            while True:
                # poll with a timeout so a dropped client never pins a thread
                try:
                    event = await asyncio.to_thread(eventQueue.get, True, 0.25)
                except queue.Empty:
                    continue
                await websocket.send_text(event.toLine())
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            mapd.bus.unsubscribe(sid)

    @app.websocket("/ws/console/{nodeId}")
    async def wsConsole(websocket: WebSocket, nodeId: str):
        await websocket.accept()
        try:
            bridge = mapd.attachConsole(nodeId)
        except OfflineMode as e:
            await websocket.close(code=1008, reason=str(e))
            return
        try:
            await bridge.start()
        except NodeNotRunning as e:
            await websocket.close(code=1011, reason=str(e))
            return
        reader = asyncio.create_task(bridge.pumpToWebsocket(websocket))
        writer = asyncio.create_task(bridge.pumpFromWebsocket(websocket))
        try:
            await asyncio.wait({reader, writer}, return_when=asyncio.FIRST_COMPLETED)
        finally:
            reader.cancel()
            writer.cancel()
            await bridge.close()

    if mapd.staticDir and os.path.isdir(mapd.staticDir):
        app.mount("/", StaticFiles(directory=mapd.staticDir, html=True), name="static")

    return app


def configFromEnv() -> Mapd:
    return Mapd(
        mode=os.environ.get("MAPD_MODE", "offline"),
        manifestDir=os.environ.get("MAPD_MANIFEST"),
        runtimeSocket=os.environ.get("MAPD_RUNTIME_SOCKET", DEFAULT_SOCKET),
        staticDir=os.environ.get("MAPD_STATIC_DIR"),
    )


def main(argv: Optional[list[str]] = None):
    import uvicorn

    mapd = configFromEnv()
    if mapd.mode == "live":
        mapd.refreshTopology()
    port = int(os.environ.get("MAPD_PORT", DEFAULT_PORT))
    app = createApp(mapd)

    @app.on_event("startup")
    async def _startCaptures():
        await mapd.startCaptures()

    uvicorn.run(app, host="0.0.0.0", port=port)
