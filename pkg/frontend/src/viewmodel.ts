import { EventFeed, HighlightTracker, parseEventLine } from './events.js';
import { GraphModel, layoutTopology, type Point } from './graph.js';
import type { SniffEvent, TopologyDocument, TopologyNode } from './types.js';

export interface ViewSize {
  width: number;
  height: number;
}

/**
 * All map state the page renders from: the topology, positions, the event
 * feed, per-node glow, and the current selection. Pure TypeScript so every
 * behavior is testable without a browser.
 */
export class MapViewModel {
  readonly model: GraphModel;
  readonly positions: Map<string, Point>;
  readonly feed: EventFeed;
  readonly highlights: HighlightTracker;
  private selected: string | null = null;

  constructor(
    doc: TopologyDocument,
    readonly size: ViewSize = { width: 1200, height: 800 },
    feedCapacity: number = 500,
    highlightTtlMs: number = 800,
  ) {
    this.model = new GraphModel(doc);
    this.positions = layoutTopology(this.model, size);
    this.feed = new EventFeed(feedCapacity);
    this.highlights = new HighlightTracker(highlightTtlMs);
  }

  /** Feed one websocket line in; returns the event when it was usable. */
  applyEventLine(line: string, nowMs: number): SniffEvent | null {
    const event = parseEventLine(line);
    if (event === null) {
      return null;
    }
    this.feed.push(event);
    if (this.model.nodeById.has(event.nodeId)) {
      this.highlights.mark(event.nodeId, nowMs);
    }
    return event;
  }

  glowAt(nowMs: number): Map<string, number> {
    return this.highlights.activeAt(nowMs);
  }

  select(nodeId: string | null): void {
    this.selected = nodeId !== null && this.model.nodeById.has(nodeId) ? nodeId : null;
  }

  selectedNode(): TopologyNode | null {
    return this.selected === null ? null : (this.model.nodeById.get(this.selected) ?? null);
  }

  /** Container ids whose traffic lit up, in arrival order. */
  highlightOrder(): string[] {
    return this.highlights.markHistory();
  }

  stats(): { nodes: number; networks: number; edges: number } {
    return {
      nodes: this.model.nodeCount(),
      networks: this.model.netCount(),
      edges: this.model.edges.length,
    };
  }
}
