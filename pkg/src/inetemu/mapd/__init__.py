"""Map backend: topology, event streaming, recordings and console access."""

from .capfilter import evalFilter, parseFilter
from .events import EventBus, Recorder, SniffEvent, replayRecording, scheduleReplay
from .server import Mapd, configFromEnv, createApp, main, parseCaptureLine
from .topology import TopologyDocument, loadTopology, topologyFromContainers

__all__ = [
    "EventBus",
    "Mapd",
    "Recorder",
    "SniffEvent",
    "TopologyDocument",
    "configFromEnv",
    "createApp",
    "evalFilter",
    "loadTopology",
    "main",
    "parseCaptureLine",
    "parseFilter",
    "replayRecording",
    "scheduleReplay",
    "topologyFromContainers",
]
