import type { GraphModel, Point } from './graph.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

const ROLE_RADIUS: Record<string, number> = {
  host: 3,
  router: 4.5,
  routeServer: 4.5,
  realWorldRouter: 4.5,
  svc: 3,
};

function fixed(value: number): string {
  return value.toFixed(1);
}

/**
 * The whole map as one SVG string: edges underneath, then networks, then
 * machines. Highlight intensities (0..1) widen and brighten a node's halo.
 */
export function renderSvg(
  model: GraphModel,
  positions: Map<string, Point>,
  size: { width: number; height: number },
  highlights: Map<string, number> = new Map(),
): string {
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${size.width} ${size.height}">`,
    '<g class="edges">',
  ];
  for (const edge of model.edges) {
    const a = positions.get(edge.nodeId);
    const b = positions.get(edge.netKey);
    if (!a || !b) {
      continue;
    }
    parts.push(
      `<line class="edge" x1="${fixed(a.x)}" y1="${fixed(a.y)}" ` +
        `x2="${fixed(b.x)}" y2="${fixed(b.y)}"></line>`,
    );
  }
  parts.push('</g>', '<g class="nets">');
  for (const [key, net] of [...model.netByKey.entries()].sort()) {
    const p = positions.get(key);
    if (!p) {
      continue;
    }
    const kind = net.scope === 'ix' ? 'net ix' : 'net';
    parts.push(
      `<rect class="${kind}" data-key="${escapeHtml(key)}" x="${fixed(p.x - 4)}" ` +
        `y="${fixed(p.y - 4)}" width="8" height="8"><title>${escapeHtml(
          `${net.name} ${net.prefix}`,
        )}</title></rect>`,
    );
  }
  parts.push('</g>', '<g class="nodes">');
  const ids = [...model.nodeById.keys()].sort();
  for (const id of ids) {
    const node = model.nodeById.get(id)!;
    const p = positions.get(id);
    if (!p) {
      continue;
    }
    const glow = highlights.get(id) ?? 0;
    const radius = (ROLE_RADIUS[node.role] ?? 3) + 3 * glow;
    const classes = glow > 0 ? `node ${node.role} lit` : `node ${node.role}`;
    parts.push(
      `<circle class="${classes}" data-id="${escapeHtml(id)}" cx="${fixed(p.x)}" ` +
        `cy="${fixed(p.y)}" r="${fixed(radius)}" style="--glow:${glow.toFixed(2)}">` +
        `<title>${escapeHtml(`${id} (AS${node.asn} ${node.role})`)}</title></circle>`,
    );
  }
  parts.push('</g>', '</svg>');
  return parts.join('\n');
}
