/** Panel rendering, red-icon toggling, and value marking against a recorded feed. */

import { beforeEach, describe, expect, it } from "vitest";

import { Api } from "../src/api.js";
import { createApp, type App } from "../src/app.js";
import { ViewState } from "../src/state.js";
import type { FeedbackItem, StepEventData } from "../src/types.js";
import {
  MockEventSource,
  createMockService,
  loadFixture,
  type MockService,
  type SessionFixture,
} from "./mockService.js";

const tick = () => new Promise((resolve) => setTimeout(resolve, 0));

interface Booted {
  app: App;
  fixture: SessionFixture;
  service: MockService;
  source: MockEventSource;
}

async function bootApp(fixtureName: string, markFailures = 0): Promise<Booted> {
  const fixture = loadFixture(fixtureName);
  const service = createMockService({ fixture, markFailures });
  MockEventSource.reset();
  document.body.innerHTML = '<div id="root"></div>';
  const root = document.getElementById("root")!;
  const app = createApp(root, {
    api: new Api({ fetchFn: service.fetchFn }),
    eventSourceFactory: (url) => new MockEventSource(url),
    reconnectDelayMs: 1,
  });
  await app.loadScreenplay("scr-1");
  for (const role of fixture.export.activated) app.toggleRole(role);
  await app.createSession();
  return { app, fixture, service, source: MockEventSource.latest() };
}

describe("panels render from a recorded SSE fixture", () => {
  let booted: Booted;

  beforeEach(async () => {
    booted = await bootApp("evalpe.json");
    booted.source.emitAll(booted.fixture.events);
  });

  it("renders all three panels", () => {
    expect(document.querySelector(".control-panel")).toBeTruthy();
    expect(document.querySelector(".enactment-panel")).toBeTruthy();
    expect(document.querySelector(".critique-panel")).toBeTruthy();
  });

  it("enactment shows every revealed line in document order", () => {
    const rows = [...document.querySelectorAll<HTMLElement>(".enactment-panel .line")];
    const steps = booted.fixture.events.filter((e) => e.event === "step");
    expect(rows.length).toBe(steps.length);
    const ordinals = rows.map((row) => Number(row.dataset.ordinal));
    expect(ordinals).toEqual([...ordinals].sort((a, b) => a - b));
  });

  it("control overview lists one clickable index per line", () => {
    const indices = document.querySelectorAll(".overview .line-index");
    expect(indices.length).toBe(booted.fixture.screenplay.lines.length);
  });

  it("critique shows one bubble per posthoc item, in log order", () => {
    const bubbles = [...document.querySelectorAll<HTMLElement>(".bubble")];
    const posthoc = booted.fixture.events.filter((e) => e.event === "posthoc");
    expect(bubbles.length).toBe(posthoc.length);
    const logOrder = booted.fixture.export.feedback_log
      .filter((item) => item.candidate.timing === "posthoc")
      .map((item) => item.candidate.id);
    expect(bubbles.map((b) => b.dataset.itemId)).toEqual(logOrder);
  });

  it("activated roles show inner thoughts beneath their lines", () => {
    const thoughts = document.querySelectorAll(".enactment-panel .thought");
    const thoughtSteps = booted.fixture.events.filter(
      (e) => e.event === "step" && e.data.inner_thought !== null,
    );
    expect(thoughts.length).toBe(thoughtSteps.length);
  });

  it("scene completion updates the critique header", () => {
    const header = document.querySelector(".scene-header")!;
    const lastScene = booted.fixture.screenplay.scenes.at(-1)!;
    expect(header.textContent).toBe(lastScene.heading);
  });

  it("renders no phantom feedback: every box maps to a logged item", () => {
    const ids = [...document.querySelectorAll<HTMLElement>("[data-item-id]")].map(
      (el) => el.dataset.itemId,
    );
    const logged = new Set(
      booted.fixture.export.feedback_log.map((item) => item.candidate.id),
    );
    for (const id of ids) expect(logged.has(id!)).toBe(true);
  });
});

describe("instant feedback red icons", () => {
  let booted: Booted;

  beforeEach(async () => {
    booted = await bootApp("evalpe.json");
    booted.source.emitAll(booted.fixture.events);
  });

  function lineWithIcon(): HTMLElement {
    const row = document.querySelector<HTMLElement>(".line:has(.instant-icon)");
    if (row) return row;
    // :has may be unsupported; fall back to a scan
    for (const candidate of document.querySelectorAll<HTMLElement>(".line")) {
      if (candidate.querySelector(".instant-icon")) return candidate;
    }
    throw new Error("no line carries an instant icon");
  }

  it("icon expands and collapses the feedback box", () => {
    const row = lineWithIcon();
    const icon = row.querySelector<HTMLButtonElement>(".instant-icon")!;
    const box = row.querySelector<HTMLElement>(".instant-box")!;
    expect(box.classList.contains("collapsed")).toBe(true);
    icon.click();
    expect(box.classList.contains("collapsed")).toBe(false);
    icon.click();
    expect(box.classList.contains("collapsed")).toBe(true);
  });

  it("two items on one line share one icon with stacked cards", () => {
    const steps = booted.fixture.events.filter(
      (e): e is { event: "step"; data: StepEventData } => e.event === "step",
    );
    const withItem = steps.find((e) => e.data.accepted_instant.length > 0)!;
    const item = withItem.data.accepted_instant[0]!;
    const clone: FeedbackItem = JSON.parse(JSON.stringify(item));
    clone.candidate = { ...clone.candidate, id: "synthetic-extra-item" };
    // a synthetic line at the end of the screenplay with two anchored items
    const extraLine = booted.fixture.screenplay.lines.at(-1)!;
    const synthetic: StepEventData = {
      line: extraLine,
      inner_thought: null,
      accepted_instant: [item, clone],
      scene_complete: false,
    };
    // re-boot on a fresh app so the synthetic step is the only render
    document.body.innerHTML = '<div id="root"></div>';
    const service = createMockService({ fixture: booted.fixture });
    const app = createApp(document.getElementById("root")!, {
      api: new Api({ fetchFn: service.fetchFn }),
      eventSourceFactory: (url) => new MockEventSource(url),
    });
    const ordinal = booted.fixture.screenplay.lines.length - 1;
    app.state = new ViewState(booted.fixture.screenplay);
    app.state.nextOrdinal = ordinal;
    app.marking = booted.app.marking;
    app.handleStep(synthetic);
    const row = document.querySelector<HTMLElement>(`[data-ordinal="${ordinal}"]`)!;
    expect(row.querySelectorAll(".instant-icon").length).toBe(1);
    expect(row.querySelectorAll(".feedback-card").length).toBe(2);
  });
});

describe("value marking", () => {
  it("click highlights and a double-click posts exactly once", async () => {
    const booted = await bootApp("evalpe.json");
    booted.source.emitAll(booted.fixture.events);
    const bubble = document.querySelector<HTMLElement>(".bubble")!;
    const checkmark = bubble.querySelector<HTMLButtonElement>(".checkmark")!;
    checkmark.click();
    checkmark.click(); // double-click before the first request settles
    await tick();
    expect(booted.service.markPosts.length).toBe(1);
    expect(bubble.classList.contains("marked")).toBe(true);
    checkmark.click(); // already marked: still no second request
    await tick();
    expect(booted.service.markPosts.length).toBe(1);
  });

  it("failure reverts the highlight and surfaces a notice", async () => {
    const booted = await bootApp("evalpe.json", 1);
    booted.source.emitAll(booted.fixture.events);
    const bubble = document.querySelector<HTMLElement>(".bubble")!;
    bubble.querySelector<HTMLButtonElement>(".checkmark")!.click();
    expect(bubble.classList.contains("marked")).toBe(true); // optimistic
    await tick();
    expect(bubble.classList.contains("marked")).toBe(false); // rolled back
    const notice = document.querySelector<HTMLElement>(".notice")!;
    expect(notice.hidden).toBe(false);
    expect(notice.textContent).toContain("mark failed");
  });

  it("server mark events highlight across panels", async () => {
    const booted = await bootApp("evalpe.json");
    booted.source.emitAll(booted.fixture.events);
    const bubble = document.querySelector<HTMLElement>(".bubble")!;
    const target = bubble.dataset.targetId!;
    booted.source.emit("mark", {
      target_id: target,
      character: "Youth",
      scene_content: "…",
      scene_number: 0,
      feedback_type: "posthoc",
      created_at: "2026-01-01T00:00:00Z",
    });
    expect(bubble.classList.contains("marked")).toBe(true);
  });
});

describe("mode structure in the client", () => {
  it("an EvalNoPE session renders no inner thoughts", async () => {
    const booted = await bootApp("evalnope.json");
    booted.source.emitAll(booted.fixture.events);
    expect(document.querySelectorAll(".thought").length).toBe(0);
    expect(document.querySelectorAll(".instant-icon").length).toBe(0);
    expect(document.querySelectorAll(".bubble").length).toBeGreaterThan(0);
  });

  it("critique shows an empty state until the first post-hoc item", async () => {
    const booted = await bootApp("evalpe.json");
    expect(document.querySelector(".empty-state")).toBeTruthy();
    booted.source.emitAll(booted.fixture.events);
    expect(document.querySelector(".empty-state")).toBeNull();
  });
});

describe("upload and stream failure surfaces", () => {
  it("empty upload shows the structured 422 notice", async () => {
    const booted = await bootApp("evalpe.json");
    const title = document.querySelector<HTMLInputElement>(".upload-title")!;
    const body = document.querySelector<HTMLTextAreaElement>(".upload-body")!;
    title.value = "Empty";
    body.value = "   ";
    document.querySelector<HTMLButtonElement>(".upload-button")!.click();
    await tick();
    const notice = document.querySelector<HTMLElement>(".notice")!;
    expect(notice.hidden).toBe(false);
    expect(notice.textContent).toContain("422");
    expect(booted.service.uploads).toBe(1);
  });

  it("stream drop shows the banner and reconnect clears it", async () => {
    const booted = await bootApp("evalpe.json");
    const banner = document.querySelector<HTMLElement>(".drop-banner")!;
    expect(banner.hidden).toBe(true);
    booted.source.fail();
    expect(banner.hidden).toBe(false);
    await new Promise((resolve) => setTimeout(resolve, 5));
    expect(banner.hidden).toBe(true); // reconnected with a fresh source
    expect(MockEventSource.instances.length).toBe(2);
  });
});
