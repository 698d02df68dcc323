/** Enactment panel: the script revealed line by line.
 *
 * Activated roles show their inner-thought synthesis beneath their lines;
 * accepted instant feedback collapses behind a red icon at its anchor line.
 */

import type { Marking } from "../marking.js";
import type { FeedbackItem, StepEventData } from "../types.js";
import { renderLineText } from "../types.js";

export interface EnactmentPanel {
  root: HTMLElement;
  appendStep(step: StepEventData, ordinal: number): void;
  lineElement(ordinal: number): HTMLElement | null;
  scrollToLine(ordinal: number): HTMLElement | null;
  showDropBanner(): void;
  hideDropBanner(): void;
}

function itemCard(item: FeedbackItem, marking: Marking): HTMLElement {
  const card = document.createElement("div");
  card.className = "feedback-card";
  card.dataset.itemId = item.candidate.id;
  const question = document.createElement("p");
  question.className = "question";
  question.textContent = item.candidate.question;
  const rationale = document.createElement("p");
  rationale.className = "rationale";
  rationale.textContent = item.candidate.rationale;
  const dims = document.createElement("p");
  dims.className = "dimensions";
  dims.textContent = item.candidate.dimensions.join(", ");
  card.append(question, rationale, dims);
  marking.attach(card, item.candidate.id);
  return card;
}

export function createEnactmentPanel(
  parent: HTMLElement,
  marking: () => Marking,
): EnactmentPanel {
  const root = document.createElement("section");
  root.className = "panel enactment-panel";
  root.innerHTML = `
    <h2>Enactment</h2>
    <div class="drop-banner" hidden>Live feed lost; reconnecting…</div>
    <div class="lines"></div>
  `;
  parent.appendChild(root);
  const lines = root.querySelector<HTMLDivElement>(".lines")!;
  const banner = root.querySelector<HTMLDivElement>(".drop-banner")!;

  return {
    root,
    appendStep(step, ordinal) {
      const row = document.createElement("div");
      row.className = `line kind-${step.line.kind}`;
      row.dataset.ordinal = String(ordinal);
      const text = document.createElement("div");
      text.className = "line-text";
      text.textContent = renderLineText(step.line) || " ";
      row.appendChild(text);

      if (step.inner_thought) {
        const thought = document.createElement("div");
        thought.className = "thought";
        const who = document.createElement("span");
        who.className = "thought-agent";
        who.textContent = step.inner_thought.agent;
        const synthesis = document.createElement("span");
        synthesis.className = "thought-text";
        synthesis.textContent = step.inner_thought.synthesis;
        thought.append(who, synthesis);
        marking().attach(thought, step.inner_thought.id);
        row.appendChild(thought);
      }

      if (step.accepted_instant.length > 0) {
        // one icon per line, however many items anchor here
        const icon = document.createElement("button");
        icon.type = "button";
        icon.className = "instant-icon";
        icon.textContent = "●";
        icon.title = `${step.accepted_instant.length} instant feedback`;
        const box = document.createElement("div");
        box.className = "instant-box collapsed";
        for (const item of step.accepted_instant) {
          box.appendChild(itemCard(item, marking()));
        }
        icon.addEventListener("click", () => box.classList.toggle("collapsed"));
        row.append(icon, box);
      }
      lines.appendChild(row);
    },
    lineElement(ordinal) {
      return lines.querySelector<HTMLElement>(`[data-ordinal="${ordinal}"]`);
    },
    scrollToLine(ordinal) {
      const target = lines.querySelector<HTMLElement>(`[data-ordinal="${ordinal}"]`);
      if (target) {
        target.scrollIntoView({ block: "center" });
        lines
          .querySelectorAll<HTMLElement>(".line.focused")
          .forEach((el) => el.classList.remove("focused"));
        target.classList.add("focused");
      }
      return target;
    },
    showDropBanner() {
      banner.hidden = false;
    },
    hideDropBanner() {
      banner.hidden = true;
    },
  };
}
