// Browser wiring: everything stateful lives in the DOM-free modules, this
// file only moves strings between them and the page.

import { MapApi } from './api.js';
import { ConsoleSession } from './console.js';
import { renderSvg } from './render.js';
import { feedRows, healthPanel, nodePanel } from './panels.js';
import { MapViewModel } from './viewmodel.js';

const REDRAW_MS = 120;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) {
    throw new Error(`missing #${id}`);
  }
  return found as T;
}

async function boot(): Promise<void> {
  const api = new MapApi('');
  const vm = new MapViewModel(await api.topology(), {
    width: el('map').clientWidth || 1200,
    height: el('map').clientHeight || 800,
  });

  const map = el('map');
  const feed = el<HTMLUListElement>('feed');
  const detail = el('detail');
  const status = el('status');
  const term = el('term');
  const termInput = el<HTMLInputElement>('term-input');

  let session: ConsoleSession | null = null;

  const redraw = (): void => {
    map.innerHTML = renderSvg(vm.model, vm.positions, vm.size, vm.glowAt(Date.now()));
  };

  const refreshHealth = async (): Promise<void> => {
    status.innerHTML = healthPanel(await api.health());
  };

  const openConsole = (nodeId: string): void => {
    session?.dispose();
    const socket = new WebSocket(api.consoleUrl(nodeId, window.location.origin));
    session = new ConsoleSession(nodeId, socket as never, () => {
      term.textContent = session?.transcript().join('\n') ?? '';
      term.scrollTop = term.scrollHeight;
    });
    term.textContent = `connecting to ${nodeId}...`;
  };

  map.addEventListener('click', (ev) => {
    const target = ev.target as Element | null;
    const id = target?.closest('[data-id]')?.getAttribute('data-id') ?? null;
    vm.select(id);
    const node = vm.selectedNode();
    detail.innerHTML = node ? nodePanel(node) : '<p>select a node</p>';
  });

  detail.addEventListener('click', (ev) => {
    const target = ev.target as Element | null;
    const nodeId = target?.getAttribute('data-console');
    if (nodeId) {
      openConsole(nodeId);
    }
  });

  termInput.addEventListener('keydown', (ev) => {
    if (ev.key === 'Enter' && session && termInput.value) {
      session.run(termInput.value);
      termInput.value = '';
    }
  });

  el<HTMLFormElement>('filter-form').addEventListener('submit', (ev) => {
    ev.preventDefault();
    const expr = el<HTMLInputElement>('filter-input').value;
    void api
      .setFilter(expr)
      .then(refreshHealth)
      .catch((err) => {
        status.textContent = `filter rejected: ${err}`;
      });
  });

  const events = new WebSocket(api.eventsUrl(window.location.origin));
  events.onmessage = (msg) => {
    vm.applyEventLine(String(msg.data), Date.now());
    feed.innerHTML = feedRows(vm.feed.recent(30));
    feed.scrollTop = feed.scrollHeight;
  };

  redraw();
  setInterval(redraw, REDRAW_MS);
  await refreshHealth();
  setInterval(() => void refreshHealth(), 5000);
}

void boot();
