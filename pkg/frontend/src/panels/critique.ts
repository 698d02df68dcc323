/** Critique panel: post-hoc feedback as a scrollable bubble list. */

import type { Marking } from "../marking.js";
import type { FeedbackItem } from "../types.js";

export interface CritiquePanel {
  root: HTMLElement;
  appendItem(item: FeedbackItem): void;
  setSceneHeader(heading: string): void;
  bubbleCount(): number;
}

export function createCritiquePanel(
  parent: HTMLElement,
  marking: () => Marking,
): CritiquePanel {
  const root = document.createElement("section");
  root.className = "panel critique-panel";
  root.innerHTML = `
    <h2>Critique</h2>
    <div class="scene-header"> </div>
    <div class="bubbles"><div class="empty-state">No scene-level feedback yet.</div></div>
  `;
  parent.appendChild(root);
  const bubbles = root.querySelector<HTMLDivElement>(".bubbles")!;
  const header = root.querySelector<HTMLDivElement>(".scene-header")!;

  return {
    root,
    appendItem(item) {
      bubbles.querySelector(".empty-state")?.remove();
      const bubble = document.createElement("div");
      bubble.className = "bubble";
      bubble.dataset.itemId = item.candidate.id;
      const source = document.createElement("span");
      source.className = "bubble-source";
      source.textContent = `${item.candidate.agent_or_source} · scene ${item.candidate.scene_index}`;
      const question = document.createElement("p");
      question.className = "question";
      question.textContent = item.candidate.question;
      const rationale = document.createElement("p");
      rationale.className = "rationale";
      rationale.textContent = item.candidate.rationale;
      bubble.append(source, question, rationale);
      marking().attach(bubble, item.candidate.id);
      bubbles.appendChild(bubble);
    },
    setSceneHeader(heading) {
      header.textContent = heading;
    },
    bubbleCount() {
      return bubbles.querySelectorAll(".bubble").length;
    },
  };
}
