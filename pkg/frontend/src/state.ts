/** Client view state: event ordering buffer, activation, mark bookkeeping.
 *
 * Step events may arrive with jitter; they are buffered and released strictly
 * in document order so the enactment panel always matches the screenplay.
 */

import type { ScreenplayDoc, ScriptLine, StepEventData } from "./types.js";

export class ViewState {
  readonly ordinals = new Map<string, number>();
  nextOrdinal = 0;
  private pendingSteps = new Map<number, StepEventData>();
  readonly markedIds = new Set<string>();
  readonly pendingMarks = new Set<string>();
  readonly renderedItemIds = new Set<string>();

  constructor(readonly screenplay: ScreenplayDoc) {
    screenplay.lines.forEach((line, i) => {
      this.ordinals.set(ViewState.key(line), i);
    });
  }

  static key(line: ScriptLine): string {
    return `${line.scene_index}:${line.line_index}`;
  }

  ordinalOf(line: ScriptLine): number {
    const ordinal = this.ordinals.get(ViewState.key(line));
    if (ordinal === undefined) {
      throw new Error(`line ${ViewState.key(line)} is not part of the screenplay`);
    }
    return ordinal;
  }

  /** Buffer one step event; return every step now ready, in document order. */
  ingestStep(data: StepEventData): StepEventData[] {
    this.pendingSteps.set(this.ordinalOf(data.line), data);
    const ready: StepEventData[] = [];
    while (this.pendingSteps.has(this.nextOrdinal)) {
      const step = this.pendingSteps.get(this.nextOrdinal)!;
      this.pendingSteps.delete(this.nextOrdinal);
      ready.push(step);
      this.nextOrdinal += 1;
    }
    return ready;
  }
}
