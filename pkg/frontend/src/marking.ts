/** Value marking: green checkmarks with optimistic highlight and rollback. */

import type { Api } from "./api.js";
import type { ViewState } from "./state.js";

export class Marking {
  constructor(
    private api: Api,
    private sessionId: string,
    private state: ViewState,
    private notify: (message: string) => void,
  ) {}

  /** Attach a checkmark button for `targetId` inside `host`. */
  attach(host: HTMLElement, targetId: string): HTMLButtonElement {
    host.dataset.targetId = targetId;
    const button = document.createElement("button");
    button.className = "checkmark";
    button.type = "button";
    button.textContent = "✓";
    button.title = "mark as valuable";
    button.addEventListener("click", () => void this.mark(targetId));
    host.appendChild(button);
    if (this.state.markedIds.has(targetId)) {
      this.highlight(targetId, true);
    }
    return button;
  }

  /** Highlight (or clear) every element bound to the target, in any panel. */
  highlight(targetId: string, on: boolean): void {
    const hosts = document.querySelectorAll<HTMLElement>(
      `[data-target-id="${targetId}"]`,
    );
    hosts.forEach((host) => host.classList.toggle("marked", on));
  }

  /** Server-confirmed mark (from the event feed or a reload). */
  applyServerMark(targetId: string): void {
    this.state.markedIds.add(targetId);
    this.highlight(targetId, true);
  }

  private async mark(targetId: string): Promise<void> {
    // double-click safety: one request per target, ever
    if (this.state.markedIds.has(targetId) || this.state.pendingMarks.has(targetId)) {
      return;
    }
    this.state.pendingMarks.add(targetId);
    this.highlight(targetId, true); // optimistic
    try {
      await this.api.mark(this.sessionId, targetId);
      this.state.markedIds.add(targetId);
    } catch (err) {
      this.highlight(targetId, false);
      this.notify(`mark failed: ${err instanceof Error ? err.message : String(err)}`);
    } finally {
      this.state.pendingMarks.delete(targetId);
    }
  }
}
