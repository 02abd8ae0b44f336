import type { TopologyDocument, TopologyNet, TopologyNode } from './types.js';

export interface Point {
  x: number;
  y: number;
}

export interface ResolvedEdge {
  nodeId: string;
  netKey: string;
  address: string;
}

/** Key a network by scope so equal names in different ASes stay distinct. */
export function netKey(net: TopologyNet): string {
  return `${net.scope}/${net.name}`;
}

/**
 * Lookup structures over a topology document.
 *
 * Edges on the wire name networks without a scope; a node's interface always
 * refers to a network inside its own AS, except exchange lans whose reserved
 * ix-prefixed names are global.
 */
export class GraphModel {
  readonly nodeById = new Map<string, TopologyNode>();
  readonly netByKey = new Map<string, TopologyNet>();
  readonly edges: ResolvedEdge[] = [];
  readonly neighbors = new Map<string, Set<string>>();

  constructor(readonly doc: TopologyDocument) {
    for (const node of doc.nodes) {
      this.nodeById.set(node.id, node);
    }
    for (const net of doc.networks) {
      this.netByKey.set(netKey(net), net);
    }
    for (const edge of doc.edges) {
      const node = this.nodeById.get(edge.node);
      if (!node) {
        continue;
      }
      const scope = edge.net.startsWith('ix') ? 'ix' : String(node.asn);
      const key = `${scope}/${edge.net}`;
      if (!this.netByKey.has(key)) {
        continue;
      }
      this.edges.push({ nodeId: edge.node, netKey: key, address: edge.address });
      this.link(edge.node, key);
    }
  }

  private link(a: string, b: string): void {
    if (!this.neighbors.has(a)) {
      this.neighbors.set(a, new Set());
    }
    if (!this.neighbors.has(b)) {
      this.neighbors.set(b, new Set());
    }
    this.neighbors.get(a)!.add(b);
    this.neighbors.get(b)!.add(a);
  }

  nodeCount(): number {
    return this.nodeById.size;
  }

  netCount(): number {
    return this.netByKey.size;
  }

  /** Distinct ASNs of non-exchange machines, ascending. */
  asns(): number[] {
    const seen = new Set<number>();
    for (const node of this.nodeById.values()) {
      if (node.role !== 'routeServer') {
        seen.add(node.asn);
      }
    }
    return [...seen].sort((a, b) => a - b);
  }
}

export interface LayoutOptions {
  width: number;
  height: number;
}

const TAU = Math.PI * 2;

function onCircle(center: Point, radius: number, index: number, count: number): Point {
  const angle = (index / Math.max(count, 1)) * TAU - Math.PI / 2;
  return {
    x: center.x + radius * Math.cos(angle),
    y: center.y + radius * Math.sin(angle),
  };
}

/**
 * Deterministic positions for every machine and network.
 *
 * Exchange lans sit on an inner ring with their route servers beside them;
 * each AS becomes a small circle of members on an outer ring. Input order
 * never matters: everything is sorted before placement.
 */
export function layoutTopology(model: GraphModel, opts: LayoutOptions): Map<string, Point> {
  const { width, height } = opts;
  const center: Point = { x: width / 2, y: height / 2 };
  const outer = 0.42 * Math.min(width, height);
  const inner = 0.17 * Math.min(width, height);
  const positions = new Map<string, Point>();

  const ixKeys = [...model.netByKey.keys()].filter((k) => k.startsWith('ix/')).sort();
  ixKeys.forEach((key, i) => {
    positions.set(key, onCircle(center, inner, i, ixKeys.length));
  });

  const servers = [...model.nodeById.values()]
    .filter((n) => n.role === 'routeServer')
    .sort((a, b) => a.id.localeCompare(b.id));
  for (const rs of servers) {
    const lan = rs.interfaces[0] ? `ix/${rs.interfaces[0].net}` : ixKeys[0];
    const anchor = (lan ? positions.get(lan) : undefined) ?? center;
    positions.set(rs.id, { x: anchor.x, y: anchor.y + 18 });
  }

  const asns = model.asns();
  asns.forEach((asn, i) => {
    const clusterCenter = onCircle(center, outer, i, asns.length);
    const members: string[] = [];
    for (const node of [...model.nodeById.values()].sort((a, b) => a.id.localeCompare(b.id))) {
      if (node.role !== 'routeServer' && node.asn === asn) {
        members.push(node.id);
      }
    }
    for (const key of [...model.netByKey.keys()].sort()) {
      if (key.startsWith(`${asn}/`)) {
        members.push(key);
      }
    }
    const radius = 12 + 3.5 * Math.sqrt(members.length);
    members.forEach((id, j) => {
      positions.set(id, onCircle(clusterCenter, radius, j, members.length));
    });
  });

  return positions;
}
