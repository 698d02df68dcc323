/** SSE subscription with drop detection and reconnection. */

import type { FeedbackItem, MarkDoc, StepEventData } from "./types.js";

export interface EventSourceLike {
  addEventListener(type: string, listener: (event: MessageEvent) => void): void;
  close(): void;
  onerror: ((event: unknown) => void) | null;
}

export type EventSourceFactory = (url: string) => EventSourceLike;

export interface FeedHandlers {
  onStep(data: StepEventData): void;
  onPosthoc(item: FeedbackItem): void;
  onMark(mark: MarkDoc): void;
  onDrop(): void;
  onReconnect(): void;
}

export class FeedSubscription {
  private source: EventSourceLike | null = null;
  private closed = false;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private url: string,
    private factory: EventSourceFactory,
    private handlers: FeedHandlers,
    private reconnectDelayMs = 2000,
  ) {}

  start(): void {
    this.closed = false;
    this.connect();
  }

  private connect(): void {
    const source = this.factory(this.url);
    this.source = source;
    const parse = <T>(event: MessageEvent): T => JSON.parse(event.data as string) as T;
    source.addEventListener("step", (event) =>
      this.handlers.onStep(parse<StepEventData>(event)),
    );
    source.addEventListener("posthoc", (event) =>
      this.handlers.onPosthoc(parse<FeedbackItem>(event)),
    );
    source.addEventListener("mark", (event) =>
      this.handlers.onMark(parse<MarkDoc>(event)),
    );
    source.onerror = () => {
      if (this.closed) return;
      this.handlers.onDrop();
      source.close();
      this.reconnectTimer = setTimeout(() => {
        if (this.closed) return;
        this.handlers.onReconnect();
        this.connect();
      }, this.reconnectDelayMs);
    };
  }

  close(): void {
    this.closed = true;
    if (this.reconnectTimer !== null) {
      clearTimeout(this.reconnectTimer);
    }
    this.source?.close();
  }
}
