import { escapeHtml } from './render.js';
import type { HealthInfo, SniffEvent, TopologyNode } from './types.js';

/** Detail card for a selected machine. */
export function nodePanel(node: TopologyNode): string {
  const rows = node.interfaces
    .map(
      (itf) =>
        `<tr><td>${escapeHtml(itf.net)}</td><td>${escapeHtml(itf.address)}</td></tr>`,
    )
    .join('');
  const title = node.displayName || node.id;
  const description = node.description
    ? `<p>${escapeHtml(node.description)}</p>`
    : '';
  return [
    `<h2>${escapeHtml(title)}</h2>`,
    `<p class="meta">AS${node.asn} &middot; ${escapeHtml(node.role)} &middot; ${escapeHtml(node.name)}</p>`,
    description,
    `<table class="ifaces"><tbody>${rows}</tbody></table>`,
    `<button data-console="${escapeHtml(node.id)}">open console</button>`,
  ].join('\n');
}

export function healthPanel(health: HealthInfo): string {
  const filter = health.filter === null ? 'none' : health.filter;
  return [
    `<span class="mode ${health.mode}">${health.mode}</span>`,
    `<span>${health.nodes} nodes</span>`,
    `<span>filter: ${escapeHtml(filter)}</span>`,
    `<span>dropped: ${health.droppedEvents}</span>`,
    `<span>recordings: ${health.recordings.length}</span>`,
  ].join(' ');
}

/** One feed row per event, newest last. */
export function feedRows(events: SniffEvent[]): string {
  return events
    .map((e) => {
      const proto = e.proto ? `<b>${escapeHtml(e.proto)}</b> ` : '';
      return `<li data-node="${escapeHtml(e.nodeId)}">${proto}${escapeHtml(e.summary)}</li>`;
    })
    .join('\n');
}
