/** Control panel: screenplay upload, role activation, line overview. */

import type { ScreenplayDoc } from "../types.js";
import { renderLineText } from "../types.js";

export interface ControlCallbacks {
  onUpload(title: string, body: string): void;
  onToggleRole(name: string): void;
  onCreateSession(): void;
  onLineClick(ordinal: number): void;
  onStep(): void;
}

export interface ControlPanel {
  root: HTMLElement;
  renderRoles(characters: string[], activated: Set<string>): void;
  renderOverview(screenplay: ScreenplayDoc): void;
  setNotice(message: string): void;
  clearNotice(): void;
}

export function createControlPanel(
  parent: HTMLElement,
  callbacks: ControlCallbacks,
): ControlPanel {
  const root = document.createElement("section");
  root.className = "panel control-panel";
  root.innerHTML = `
    <h2>Control</h2>
    <div class="upload">
      <input class="upload-title" type="text" placeholder="Title" />
      <textarea class="upload-body" placeholder="Paste a screenplay"></textarea>
      <button class="upload-button" type="button">+ Select Screenplay</button>
    </div>
    <div class="notice" hidden></div>
    <h3>Activate Role Support</h3>
    <div class="roles"></div>
    <button class="create-session" type="button" hidden>Start session</button>
    <button class="step-next" type="button" hidden>Next line</button>
    <h3>Screenplay Overview</h3>
    <ol class="overview" start="0"></ol>
  `;
  parent.appendChild(root);

  const select = <T extends HTMLElement>(sel: string): T => {
    const el = root.querySelector<T>(sel);
    if (!el) throw new Error(`control panel is missing ${sel}`);
    return el;
  };
  const notice = select<HTMLDivElement>(".notice");

  select<HTMLButtonElement>(".upload-button").addEventListener("click", () => {
    callbacks.onUpload(
      select<HTMLInputElement>(".upload-title").value,
      select<HTMLTextAreaElement>(".upload-body").value,
    );
  });
  select<HTMLButtonElement>(".create-session").addEventListener("click", () =>
    callbacks.onCreateSession(),
  );
  select<HTMLButtonElement>(".step-next").addEventListener("click", () =>
    callbacks.onStep(),
  );

  return {
    root,
    renderRoles(characters, activated) {
      const container = select<HTMLDivElement>(".roles");
      container.textContent = "";
      for (const name of characters) {
        const button = document.createElement("button");
        button.type = "button";
        button.className = "role-toggle";
        button.dataset.role = name;
        button.textContent = name;
        button.classList.toggle("active", activated.has(name));
        button.addEventListener("click", () => callbacks.onToggleRole(name));
        container.appendChild(button);
      }
      select<HTMLButtonElement>(".create-session").hidden = false;
    },
    renderOverview(screenplay) {
      const list = select<HTMLOListElement>(".overview");
      list.textContent = "";
      screenplay.lines.forEach((line, ordinal) => {
        const item = document.createElement("li");
        item.className = "line-index";
        item.dataset.ordinal = String(ordinal);
        item.textContent = renderLineText(line) || " ";
        item.addEventListener("click", () => callbacks.onLineClick(ordinal));
        list.appendChild(item);
      });
      select<HTMLButtonElement>(".step-next").hidden = false;
    },
    setNotice(message) {
      notice.textContent = message;
      notice.hidden = false;
    },
    clearNotice() {
      notice.textContent = "";
      notice.hidden = true;
    },
  };
}
