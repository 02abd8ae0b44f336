import type {
  HealthInfo,
  RecordingStarted,
  RecordingStopped,
  ReplayStarted,
  SniffEvent,
  TopologyDocument,
  TopologyNode,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

/**
 * Typed client for the map backend. Everything the UI knows about the
 * emulation flows through here; there is no other channel to the backend.
 */
export class MapApi {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!res.ok) {
      throw new ApiError(res.status, await res.text());
    }
    return (await res.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
    if (!res.ok) {
      throw new ApiError(res.status, await res.text());
    }
    return (await res.json()) as T;
  }

  topology(): Promise<TopologyDocument> {
    return this.get('/api/topology');
  }

  health(): Promise<HealthInfo> {
    return this.get('/api/health');
  }

  node(id: string): Promise<TopologyNode> {
    return this.get(`/api/nodes/${encodeURIComponent(id)}`);
  }

  setFilter(expr: string): Promise<{ ok: boolean; expr: string }> {
    return this.post('/api/filter', { expr });
  }

  startRecording(): Promise<RecordingStarted> {
    return this.post('/api/recordings', { action: 'start' });
  }

  stopRecording(): Promise<RecordingStopped> {
    return this.post('/api/recordings', { action: 'stop' });
  }

  replay(id: string, intervalMs: number): Promise<ReplayStarted> {
    return this.post('/api/replay', { id, intervalMs });
  }

  /** Offline-only: push synthetic events into the stream. */
  injectEvents(events: Partial<SniffEvent>[]): Promise<{ accepted: number }> {
    return this.post('/api/events', { events });
  }

  /** ws:// or wss:// URL for a websocket path, derived from the page origin. */
  wsUrl(path: string, origin: string): string {
    const base = origin.replace(/^http/, 'ws');
    return `${base}${path}`;
  }

  eventsUrl(origin: string): string {
    return this.wsUrl('/ws/events', origin);
  }

  consoleUrl(nodeId: string, origin: string): string {
    return this.wsUrl(`/ws/console/${encodeURIComponent(nodeId)}`, origin);
  }
}
