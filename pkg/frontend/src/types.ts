// Wire types for the mapd HTTP/WS API. Field names mirror the JSON exactly.

export interface InterfaceInfo {
  net: string;
  address: string;
}

export interface TopologyNode {
  id: string;
  name: string;
  asn: number;
  role: string; // host | router | routeServer | realWorldRouter | svc
  displayName: string;
  description: string;
  interfaces: InterfaceInfo[];
}

export interface TopologyNet {
  name: string;
  scope: string; // decimal ASN or "ix"
  prefix: string;
}

export interface TopologyEdge {
  node: string;
  net: string;
  address: string;
}

export interface TopologyDocument {
  nodes: TopologyNode[];
  networks: TopologyNet[];
  edges: TopologyEdge[];
}

export interface HealthInfo {
  mode: 'offline' | 'live';
  nodes: number;
  filter: string | null;
  droppedEvents: number;
  recordings: string[];
}

/** One captured (or injected) packet event as sent over /ws/events. */
export interface SniffEvent {
  nodeId: string;
  timestampMs: number;
  summary: string;
  proto?: string;
  src?: string;
  dst?: string;
  sport?: number;
  dport?: number;
}

export interface RecordingStarted {
  id: string;
  state: 'recording';
}

export interface RecordingStopped {
  id: string;
  state: 'stopped';
  events: number;
}

export interface ReplayStarted {
  ok: boolean;
  id: string;
  events: number;
  intervalMs: number;
}
