import { readFileSync } from 'node:fs';
import { describe, expect, it } from 'vitest';

import { MapViewModel } from '../src/viewmodel.js';
import type { TopologyDocument } from '../src/types.js';

const doc = JSON.parse(
  readFileSync(new URL('./topology.fixture.json', import.meta.url), 'utf8'),
) as TopologyDocument;

function freshViewModel(): MapViewModel {
  return new MapViewModel(doc);
}

/** The wire shape a replayed capture event arrives in on /ws/events. */
function replayLine(nodeId: string, seq: number): string {
  return JSON.stringify({
    nodeId,
    timestampMs: 1000 + seq,
    summary: `IP 10.150.0.71 > 10.160.0.71: ICMP echo request, seq ${seq}`,
    proto: 'icmp',
  });
}

describe('MapViewModel', () => {
  it('builds the full map state from one topology document', () => {
    const vm = freshViewModel();
    expect(vm.stats()).toEqual({ nodes: 275, networks: 31, edges: 315 });
    expect(vm.positions.size).toBeGreaterThanOrEqual(275 + 31);
  });

  it('highlights replayed events in their replay order', () => {
    const vm = freshViewModel();
    const routers = [...vm.model.nodeById.keys()]
      .filter((id) => vm.model.nodeById.get(id)!.role === 'router')
      .sort();
    const sequence: string[] = [];
    for (let seq = 0; seq < 20; seq++) {
      sequence.push(routers[(seq * 7) % routers.length]);
    }
    sequence.forEach((nodeId, seq) => {
      const event = vm.applyEventLine(replayLine(nodeId, seq), 2000 + seq * 100);
      expect(event).not.toBeNull();
    });
    expect(vm.highlightOrder()).toEqual(sequence);
    expect(vm.feed.size()).toBe(20);
  });

  it('keeps feed entries for unknown nodes but never lights them', () => {
    const vm = freshViewModel();
    vm.applyEventLine(replayLine('not-a-container', 0), 1000);
    expect(vm.feed.size()).toBe(1);
    expect(vm.highlightOrder()).toEqual([]);
    expect(vm.glowAt(1000).size).toBe(0);
  });

  it('ignores lines that are not events', () => {
    const vm = freshViewModel();
    expect(vm.applyEventLine('keepalive', 0)).toBeNull();
    expect(vm.applyEventLine('{"other": "doc"}', 0)).toBeNull();
    expect(vm.feed.size()).toBe(0);
  });

  it('glow fades out within the default 800ms decay', () => {
    const vm = freshViewModel();
    vm.applyEventLine(replayLine('as150h-host0', 0), 10_000);
    expect(vm.glowAt(10_000).get('as150h-host0')).toBe(1);
    expect(vm.glowAt(10_400).get('as150h-host0')).toBeCloseTo(0.5);
    expect(vm.glowAt(10_800).has('as150h-host0')).toBe(false);
  });

  it('selection resolves to the full node record', () => {
    const vm = freshViewModel();
    expect(vm.selectedNode()).toBeNull();
    vm.select('as150h-host0');
    expect(vm.selectedNode()!.asn).toBe(150);
    expect(vm.selectedNode()!.role).toBe('host');
    vm.select('nonsense');
    expect(vm.selectedNode()).toBeNull();
    vm.select(null);
    expect(vm.selectedNode()).toBeNull();
  });
});
