// @vitest-environment happy-dom
import { beforeEach, describe, expect, it, vi } from "vitest";

import events from "./fixtures/coastal_cliffs_events.json";
import { renderConsole, renderParamsTable, Handlers } from "../src/dom.js";
import { SessionEvent } from "../src/types.js";
import { applyEvents, emptyViewModel, setStrategies } from "../src/viewmodel.js";

const stream = events as SessionEvent[];

function handlers(overrides: Partial<Handlers> = {}): Handlers {
  return {
    onSelectApproach: () => {},
    onFreeDirection: () => {},
    onRun: () => {},
    onReference: () => {},
    iterationImageUrl: (index) => `/img/${index}`,
    iterationHistogramUrl: (index) => `/hist/${index}`,
    sourceImageUrl: () => "/source",
    ...overrides,
  };
}

const THREE_APPROACHES = [
  { name: "A", light: "l", color: "c", mixer_notes: "m" },
  { name: "B", light: "l", color: "c", mixer_notes: "m" },
  { name: "C", light: "l", color: "c", mixer_notes: "m" },
];

describe("console rendering of the recorded demo session", () => {
  let root: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = "<main id='root'></main>";
    root = document.getElementById("root")!;
  });

  it("renders two iteration panels with verdict badges", () => {
    const model = applyEvents(emptyViewModel("demo"), stream);
    renderConsole(root, model, handlers());
    const panels = root.querySelectorAll(".iteration-panel");
    expect(panels).toHaveLength(2);
    const badges = [...root.querySelectorAll(".verdict-badge")].map((b) => b.textContent);
    expect(badges).toEqual(["not satisfactory", "satisfactory"]);
  });

  it("highlights exactly the twelve changed fields in the second panel", () => {
    const model = applyEvents(emptyViewModel("demo"), stream);
    renderConsole(root, model, handlers());
    const panel = root.querySelector(".iteration-panel[data-iteration='2']")!;
    const changedRows = [...panel.querySelectorAll("tr.changed")];
    expect(changedRows).toHaveLength(12);
    const paths = changedRows.map((row) => (row as HTMLElement).dataset.path);
    expect(paths).toEqual([
      "exposure", "contrast", "highlights", "shadows", "whites",
      "tint", "vibrance", "saturation",
      "mixer.orange.saturation", "mixer.yellow.saturation",
      "mixer.yellow.luminance", "mixer.blue.saturation",
    ]);
    const firstPanel = root.querySelector(".iteration-panel[data-iteration='1']")!;
    expect(firstPanel.querySelectorAll("tr.changed")).toHaveLength(0);
  });

  it("shows old and new values verbatim on changed rows", () => {
    const model = applyEvents(emptyViewModel("demo"), stream);
    renderConsole(root, model, handlers());
    const panel = root.querySelector(".iteration-panel[data-iteration='2']")!;
    const exposureRow = panel.querySelector("tr[data-path='exposure']")!;
    expect(exposureRow.querySelector(".old-value")!.textContent).toBe("0.5");
    expect(exposureRow.querySelector(".new-value")!.textContent).toBe("0.3");
  });

  it("posts the clicked approach index", () => {
    const model = emptyViewModel("demo");
    model.stage = "await_user_direction";
    setStrategies(model, THREE_APPROACHES, null);
    const onSelect = vi.fn();
    renderConsole(root, model, handlers({ onSelectApproach: onSelect }));
    const cards = root.querySelectorAll(".strategy-card");
    expect(cards).toHaveLength(3);
    (cards[2]!.querySelector("button.select") as HTMLButtonElement).click();
    expect(onSelect).toHaveBeenCalledWith(2);
  });

  it("renders the timeline in stream order with user and agent bubbles", () => {
    const model = applyEvents(emptyViewModel("demo"), stream);
    renderConsole(root, model, handlers());
    const entries = [...root.querySelectorAll(".timeline li")];
    expect(entries.length).toBe(model.timeline.length);
    expect(root.querySelectorAll(".entry-user").length).toBeGreaterThan(0);
    expect(root.querySelectorAll(".entry-agent").length).toBeGreaterThan(0);
  });

  it("shows the reconnect banner when the stream drops", () => {
    const model = applyEvents(emptyViewModel("demo"), stream);
    model.connection = "reconnecting";
    renderConsole(root, model, handlers());
    expect(root.querySelector(".banner-reconnecting")!.textContent).toContain("resuming");
  });

  it("renders inline notices for service refusals", () => {
    const model = applyEvents(emptyViewModel("demo"), stream);
    model.notices.push("409: direction only accepted while awaiting it");
    renderConsole(root, model, handlers());
    expect(root.querySelector(".notice")!.textContent).toContain("409");
  });

  it("disables step at the direction gate but keeps auto available", () => {
    const model = emptyViewModel("demo");
    model.stage = "await_user_direction";
    setStrategies(model, THREE_APPROACHES, null);
    renderConsole(root, model, handlers());
    expect((root.querySelector(".run-step") as HTMLButtonElement).disabled).toBe(true);
    expect((root.querySelector(".run-auto") as HTMLButtonElement).disabled).toBe(false);
  });

  it("marks step as the primary action", () => {
    const model = emptyViewModel("demo");
    renderConsole(root, model, handlers());
    expect(root.querySelector(".run-step")!.classList.contains("primary")).toBe(true);
    expect(root.querySelector(".run-auto")!.classList.contains("primary")).toBe(false);
  });

  it("offers reference upload only before the plan settles", () => {
    const early = emptyViewModel("demo");
    early.stage = "strategy_proposal";
    renderConsole(root, early, handlers());
    expect(root.querySelector(".reference-upload")).not.toBeNull();

    const late = applyEvents(emptyViewModel("demo"), stream); // stage done
    renderConsole(root, late, handlers());
    expect(root.querySelector(".reference-upload")).toBeNull();
  });

  it("sends the chosen reference file and optional params JSON", () => {
    const model = emptyViewModel("demo");
    model.stage = "await_user_direction";
    setStrategies(model, THREE_APPROACHES, null);
    const onReference = vi.fn();
    renderConsole(root, model, handlers({ onReference }));
    const input = root.querySelector(".reference-file") as HTMLInputElement;
    const file = new File([new Uint8Array([1, 2, 3])], "ref.png", { type: "image/png" });
    Object.defineProperty(input, "files", { value: [file] });
    const paramsBox = root.querySelector(".reference-params") as HTMLTextAreaElement;
    paramsBox.value = '{"highlights": -60}';
    (root.querySelector(".reference-send") as HTMLButtonElement).click();
    expect(onReference).toHaveBeenCalledWith(file, '{"highlights": -60}');
  });
});

describe("params table", () => {
  it("keeps zero-everywhere mixer channels out of the table", () => {
    const proposals = stream.filter(
      (e): e is Extract<SessionEvent, { type: "params_proposed" }> => e.type === "params_proposed");
    const table = renderParamsTable(proposals[0]!.params, null, []);
    const paths = [...table.querySelectorAll("tr")].map((r) => (r as HTMLElement).dataset.path);
    expect(paths).toContain("mixer.orange.saturation");
    expect(paths).not.toContain("mixer.red.hue");
    expect(paths.slice(0, 10)).toEqual([
      "exposure", "contrast", "highlights", "shadows", "whites",
      "blacks", "temp", "tint", "vibrance", "saturation",
    ]);
  });
});
