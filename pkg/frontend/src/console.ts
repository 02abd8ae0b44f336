// Interactive node consoles over /ws/console/{nodeId}.

export interface SocketLike {
  send(data: string): void;
  close(code?: number, reason?: string): void;
  onopen: (() => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev: { code: number; reason: string }) => void) | null;
}

export type ConsoleState = 'connecting' | 'open' | 'closed';

export interface CloseInfo {
  code: number;
  reason: string;
}

/** Human message for the backend's console close codes. */
export function closeMessage(info: CloseInfo): string {
  if (info.code === 1008) {
    return 'console unavailable: the backend is offline (no container runtime)';
  }
  if (info.code === 1011) {
    return `console unavailable: ${info.reason || 'the node is not running'}`;
  }
  return info.reason || `connection closed (${info.code})`;
}

/**
 * One shell session into a node. Keeps a terminal transcript: everything the
 * node prints plus a local echo of each command the user sends.
 */
export class ConsoleSession {
  private state: ConsoleState = 'connecting';
  private readonly lines: string[] = [];
  private partial = '';
  private closeInfo: CloseInfo | null = null;

  constructor(
    readonly nodeId: string,
    private readonly socket: SocketLike,
    private readonly onChange: () => void = () => {},
  ) {
    socket.onopen = () => {
      this.state = 'open';
      this.onChange();
    };
    socket.onmessage = (ev) => {
      this.receive(String(ev.data));
    };
    socket.onclose = (ev) => {
      this.state = 'closed';
      this.closeInfo = { code: ev.code, reason: ev.reason };
      this.lines.push(closeMessage(this.closeInfo));
      this.onChange();
    };
  }

  private receive(data: string): void {
    this.partial += data;
    const pieces = this.partial.split('\n');
    this.partial = pieces.pop() ?? '';
    for (const line of pieces) {
      this.lines.push(line.replace(/\r$/, ''));
    }
    this.onChange();
  }

  /** Echo the command locally, then hand it to the node's shell. */
  run(command: string): void {
    this.lines.push(`$ ${command}`);
    if (this.state !== 'closed') {
      this.socket.send(`${command}\n`);
    }
    this.onChange();
  }

  transcript(): string[] {
    return this.partial ? [...this.lines, this.partial] : [...this.lines];
  }

  currentState(): ConsoleState {
    return this.state;
  }

  closedWith(): CloseInfo | null {
    return this.closeInfo;
  }

  dispose(): void {
    if (this.state !== 'closed') {
      this.socket.close(1000, 'bye');
      this.state = 'closed';
    }
  }
}
