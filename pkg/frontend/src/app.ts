/** Application wiring: control (left), enactment (center), critique (right). */

import { Api, ApiError } from "./api.js";
import { Marking } from "./marking.js";
import { createControlPanel, type ControlPanel } from "./panels/control.js";
import { createCritiquePanel, type CritiquePanel } from "./panels/critique.js";
import { createEnactmentPanel, type EnactmentPanel } from "./panels/enactment.js";
import { FeedSubscription, type EventSourceFactory } from "./sse.js";
import { ViewState } from "./state.js";
import type { FeedbackItem, MarkDoc, StepEventData } from "./types.js";

export interface AppDeps {
  api: Api;
  eventSourceFactory?: EventSourceFactory;
  reconnectDelayMs?: number;
}

export class App {
  readonly control: ControlPanel;
  readonly enactment: EnactmentPanel;
  readonly critique: CritiquePanel;
  state: ViewState | null = null;
  marking: Marking | null = null;
  screenplayId: string | null = null;
  sessionId: string | null = null;
  mode = "EvalPE";
  activated = new Set<string>();
  private feed: FeedSubscription | null = null;

  constructor(
    root: HTMLElement,
    private deps: AppDeps,
  ) {
    root.classList.add("tableread-app");
    this.control = createControlPanel(root, {
      onUpload: (title, body) => void this.upload(title, body),
      onToggleRole: (name) => this.toggleRole(name),
      onCreateSession: () => void this.createSession(),
      onLineClick: (ordinal) => this.enactment.scrollToLine(ordinal),
      onStep: () => void this.stepOnce(),
    });
    this.enactment = createEnactmentPanel(root, () => this.requireMarking());
    this.critique = createCritiquePanel(root, () => this.requireMarking());
  }

  private requireMarking(): Marking {
    if (!this.marking) throw new Error("no active session");
    return this.marking;
  }

  async upload(title: string, body: string): Promise<void> {
    this.control.clearNotice();
    try {
      const { id } = await this.deps.api.uploadScreenplay({ title, body });
      await this.loadScreenplay(id);
    } catch (err) {
      this.control.setNotice(
        err instanceof ApiError ? `${err.status}: ${err.message}` : String(err),
      );
    }
  }

  async loadScreenplay(id: string): Promise<void> {
    const doc = await this.deps.api.getScreenplay(id);
    this.screenplayId = id;
    this.state = new ViewState(doc);
    this.control.renderOverview(doc);
    this.control.renderRoles(doc.characters, this.activated);
  }

  toggleRole(name: string): void {
    if (this.sessionId) return; // activation is fixed once the session exists
    if (this.activated.has(name)) {
      this.activated.delete(name);
    } else {
      this.activated.add(name);
    }
    if (this.state) {
      this.control.renderRoles(this.state.screenplay.characters, this.activated);
    }
  }

  async createSession(): Promise<string> {
    if (!this.screenplayId || !this.state) throw new Error("load a screenplay first");
    const { id } = await this.deps.api.createSession(
      this.screenplayId,
      this.mode,
      [...this.activated],
    );
    this.sessionId = id;
    this.marking = new Marking(this.deps.api, id, this.state, (msg) =>
      this.control.setNotice(msg),
    );
    this.connectFeed();
    return id;
  }

  connectFeed(): void {
    if (!this.sessionId) throw new Error("no session");
    const factory =
      this.deps.eventSourceFactory ??
      ((url: string) => new EventSource(url) as unknown as ReturnType<EventSourceFactory>);
    this.feed = new FeedSubscription(
      this.deps.api.eventsUrl(this.sessionId),
      factory,
      {
        onStep: (data) => this.handleStep(data),
        onPosthoc: (item) => this.handlePosthoc(item),
        onMark: (mark) => this.handleMark(mark),
        onDrop: () => this.enactment.showDropBanner(),
        onReconnect: () => this.enactment.hideDropBanner(),
      },
      this.deps.reconnectDelayMs,
    );
    this.feed.start();
  }

  /** User-paced reading: the "next" control advances the server cursor. */
  async stepOnce(): Promise<void> {
    if (!this.sessionId) return;
    try {
      const result = await this.deps.api.step(this.sessionId);
      if (result.scene_complete) {
        await this.deps.api.finishScene(this.sessionId);
      }
    } catch (err) {
      if (err instanceof ApiError && err.status === 410) {
        this.control.setNotice("End of screenplay.");
        return;
      }
      this.control.setNotice(String(err instanceof Error ? err.message : err));
    }
  }

  handleStep(data: StepEventData): void {
    if (!this.state) return;
    for (const step of this.state.ingestStep(data)) {
      const ordinal = this.state.ordinalOf(step.line);
      this.enactment.appendStep(step, ordinal);
      for (const item of step.accepted_instant) {
        this.state.renderedItemIds.add(item.candidate.id);
      }
      if (step.scene_complete) {
        const scene = this.state.screenplay.scenes[step.line.scene_index];
        if (scene) this.critique.setSceneHeader(scene.heading);
      }
    }
  }

  handlePosthoc(item: FeedbackItem): void {
    this.state?.renderedItemIds.add(item.candidate.id);
    this.critique.appendItem(item);
  }

  handleMark(mark: MarkDoc): void {
    this.marking?.applyServerMark(mark.target_id);
  }

  close(): void {
    this.feed?.close();
  }
}

export function createApp(root: HTMLElement, deps: AppDeps): App {
  return new App(root, deps);
}
