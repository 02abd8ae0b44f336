import type { SniffEvent } from './types.js';

/** Parse one /ws/events line; null for anything that is not a valid event. */
export function parseEventLine(line: string): SniffEvent | null {
  let doc: unknown;
  try {
    doc = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof doc !== 'object' || doc === null) {
    return null;
  }
  const record = doc as Record<string, unknown>;
  if (typeof record.nodeId !== 'string' || typeof record.summary !== 'string') {
    return null;
  }
  return {
    nodeId: record.nodeId,
    summary: record.summary,
    timestampMs: typeof record.timestampMs === 'number' ? record.timestampMs : 0,
    proto: typeof record.proto === 'string' ? record.proto : undefined,
    src: typeof record.src === 'string' ? record.src : undefined,
    dst: typeof record.dst === 'string' ? record.dst : undefined,
    sport: typeof record.sport === 'number' ? record.sport : undefined,
    dport: typeof record.dport === 'number' ? record.dport : undefined,
  };
}

/**
 * Arrival-ordered event buffer with a fixed capacity. Oldest entries fall
 * off first, matching the backend's drop-oldest queues.
 */
export class EventFeed {
  private readonly events: SniffEvent[] = [];
  private droppedCount = 0;

  constructor(private readonly capacity: number = 500) {}

  push(event: SniffEvent): void {
    this.events.push(event);
    while (this.events.length > this.capacity) {
      this.events.shift();
      this.droppedCount += 1;
    }
  }

  recent(limit: number = 50): SniffEvent[] {
    return this.events.slice(-limit);
  }

  all(): SniffEvent[] {
    return [...this.events];
  }

  size(): number {
    return this.events.length;
  }

  dropped(): number {
    return this.droppedCount;
  }
}

/**
 * Per-node activity glow. A node lights up when an event arrives and fades
 * linearly to zero over ttlMs; repeated traffic keeps it lit.
 */
export class HighlightTracker {
  private readonly lastSeen = new Map<string, number>();
  private readonly order: string[] = [];

  constructor(private readonly ttlMs: number = 800) {}

  mark(nodeId: string, atMs: number): void {
    this.lastSeen.set(nodeId, atMs);
    this.order.push(nodeId);
  }

  /** 1 right after traffic, 0 once ttlMs has passed. */
  intensityAt(nodeId: string, nowMs: number): number {
    const seen = this.lastSeen.get(nodeId);
    if (seen === undefined) {
      return 0;
    }
    const age = nowMs - seen;
    if (age <= 0) {
      return 1;
    }
    if (age >= this.ttlMs) {
      return 0;
    }
    return 1 - age / this.ttlMs;
  }

  activeAt(nowMs: number): Map<string, number> {
    const out = new Map<string, number>();
    for (const nodeId of this.lastSeen.keys()) {
      const intensity = this.intensityAt(nodeId, nowMs);
      if (intensity > 0) {
        out.set(nodeId, intensity);
      }
    }
    return out;
  }

  /** Every mark() in arrival order; replays must light nodes in sequence. */
  markHistory(): string[] {
    return [...this.order];
  }
}
