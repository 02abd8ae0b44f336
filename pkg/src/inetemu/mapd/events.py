"""Event fan-out, recording and replay.

Every websocket client gets its own bounded queue; when a slow client falls
behind, the oldest queued event is dropped and counted rather than blocking
the producers.

Queues and the replay scheduler are thread based on purpose: publishers may
sit on a different event loop (or none at all) than the websocket consumers,
so nothing here may depend on a particular loop staying alive.
"""

from __future__ import annotations

import asyncio
import concurrent.futures
import itertools
import json
import queue
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

from ..errors import UnknownRecording

DEFAULT_QUEUE_SIZE = 512


@dataclass
class SniffEvent:
    nodeId: str
    summary: str
    timestampMs: int = 0
    proto: Optional[str] = None
    src: Optional[str] = None
    dst: Optional[str] = None
    sport: Optional[int] = None
    dport: Optional[int] = None

    @staticmethod
    def fromDict(doc: dict) -> "SniffEvent":
        return SniffEvent(
            nodeId=str(doc.get("nodeId", "")),
            summary=str(doc.get("summary", "")),
            timestampMs=int(doc.get("timestampMs") or 0),
            proto=doc.get("proto"),
            src=doc.get("src"),
            dst=doc.get("dst"),
            sport=doc.get("sport"),
            dport=doc.get("dport"),
        )

    def fields(self) -> dict:
        return {
            "proto": self.proto,
            "src": self.src,
            "dst": self.dst,
            "sport": self.sport,
            "dport": self.dport,
        }

    def toJson(self) -> dict:
        doc = {
            "nodeId": self.nodeId,
            "timestampMs": self.timestampMs,
            "summary": self.summary,
        }
        for key, value in self.fields().items():
            if value is not None:
                doc[key] = value
        return doc

    def toLine(self) -> str:
        return json.dumps(self.toJson(), sort_keys=True, separators=(",", ":"))


class _Subscriber:
    def __init__(self, maxSize: int):
        self.queue: queue.Queue = queue.Queue(maxsize=maxSize)
        self.dropped = 0

    def offer(self, event: SniffEvent):
        while True:
            try:
                self.queue.put_nowait(event)
                return
            except queue.Full:
                try:
                    self.queue.get_nowait()
                    self.dropped += 1
                except queue.Empty:
                    pass


class EventBus:
    def __init__(self, maxQueueSize: int = DEFAULT_QUEUE_SIZE):
        self._maxQueueSize = maxQueueSize
        self._subscribers: dict[int, _Subscriber] = {}
        self._ids = itertools.count(1)
        self._recorders: list["Recorder"] = []
        self._lock = threading.Lock()

    def subscribe(self) -> tuple[int, queue.Queue]:
        with self._lock:
            sid = next(self._ids)
            sub = _Subscriber(self._maxQueueSize)
            self._subscribers[sid] = sub
        return sid, sub.queue

    def unsubscribe(self, sid: int):
        with self._lock:
            self._subscribers.pop(sid, None)

    def attachRecorder(self, recorder: "Recorder"):
        self._recorders.append(recorder)

    def publish(self, event: SniffEvent):
        if not event.timestampMs:
            event.timestampMs = int(time.monotonic() * 1000)
        for recorder in self._recorders:
            recorder.observe(event)
        with self._lock:
            targets = list(self._subscribers.values())
        for sub in targets:
            sub.offer(event)

    def droppedTotal(self) -> int:
        with self._lock:
            return sum(s.dropped for s in self._subscribers.values())

    def subscriberCount(self) -> int:
        return len(self._subscribers)


@dataclass
class Recording:
    id: str
    events: list[SniffEvent] = field(default_factory=list)
    closed: bool = False


class Recorder:
    """Captures published events between start and stop calls."""

    def __init__(self):
        self._recordings: dict[str, Recording] = {}
        self._active: Optional[Recording] = None
        self._counter = itertools.count(1)

    def start(self) -> str:
        rid = f"rec-{next(self._counter)}"
        self._active = Recording(id=rid)
        self._recordings[rid] = self._active
        return rid

    def stop(self) -> Optional[str]:
        if self._active is None:
            return None
        rid = self._active.id
        self._active.closed = True
        self._active = None
        return rid

    def observe(self, event: SniffEvent):
        if self._active is not None:
            self._active.events.append(event)

    def get(self, rid: str) -> Recording:
        if rid not in self._recordings:
            raise UnknownRecording(f"no recording {rid}")
        return self._recordings[rid]

    def ids(self) -> list[str]:
        return sorted(self._recordings)


def scheduleReplay(
    bus: EventBus, recording: Recording, intervalMs: int
) -> concurrent.futures.Future:
    """Re-publish a recording in order, one event every intervalMs.

    Runs on its own daemon thread so delivery keeps going even if the
    request (and event loop) that triggered the replay is long gone.
    Returns a future resolving to the event count after the last publish.
    """
    done: concurrent.futures.Future = concurrent.futures.Future()
    events = list(recording.events)
    if not events:
        done.set_result(0)
        return done

    def run():
        for i, event in enumerate(events):
            if i:
                time.sleep(intervalMs / 1000.0)
            copy = SniffEvent.fromDict(event.toJson())
            copy.timestampMs = int(time.monotonic() * 1000)
            bus.publish(copy)
        done.set_result(len(events))

    threading.Thread(target=run, name=f"replay-{recording.id}", daemon=True).start()
    return done


async def replayRecording(bus: EventBus, recording: Recording, intervalMs: int) -> int:
    """Replay a recording and wait until the last event has been published."""
    return await asyncio.wrap_future(scheduleReplay(bus, recording, intervalMs))
