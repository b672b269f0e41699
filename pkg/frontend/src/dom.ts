/** DOM rendering of the view model. Values print verbatim from server
 * JSON; the only client-side computation is the change-set used for
 * old/new highlighting. */

import { getField } from "./diff.js";
import { ParamSet, BASIC_FIELDS, MIXER_CHANNELS, MIXER_COMPONENTS } from "./types.js";
import { ConsoleViewModel, IterationPanel, stageLabel } from "./viewmodel.js";

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface Handlers {
  onSelectApproach(index: number): void;
  onFreeDirection(text: string): void;
  onRun(mode: "step" | "auto"): void;
  onReference(image: File, paramsJson?: string): void;
  iterationImageUrl(index: number): string;
  iterationHistogramUrl(index: number): string;
  sourceImageUrl(): string;
}

const PRE_PLAN_STAGES = new Set([
  "content_description", "strategy_proposal", "await_user_direction",
]);

export function renderConsole(root: HTMLElement, model: ConsoleViewModel,
                              handlers: Handlers): void {
  root.replaceChildren();
  root.appendChild(renderBanner(model));
  root.appendChild(renderTimeline(model));
  if (model.stage === "await_user_direction" && model.strategies.length === 3) {
    root.appendChild(renderStrategyCards(model, handlers));
  }
  if (PRE_PLAN_STAGES.has(model.stage)) {
    root.appendChild(renderReferenceUpload(handlers));
  }
  root.appendChild(renderControls(model, handlers));
  const panels = el("section", "panels");
  for (const panel of model.panels) {
    panels.appendChild(renderIterationPanel(model, panel, handlers));
  }
  root.appendChild(panels);
  if (model.summary) {
    const summary = el("section", "summary");
    summary.appendChild(el("h2", undefined, `Finished: ${model.outcome ?? ""}`));
    summary.appendChild(el("p", undefined, model.summary));
    root.appendChild(summary);
  }
}

function renderBanner(model: ConsoleViewModel): HTMLElement {
  const banner = el("div", `banner banner-${model.connection}`);
  const labels: Record<string, string> = {
    connecting: "Connecting to the session stream...",
    open: `Session ${model.sessionId} - ${stageLabel(model.stage)}`,
    reconnecting: "Connection lost - reconnecting and resuming from the last event...",
    closed: "Stream closed.",
  };
  banner.textContent = labels[model.connection] ?? model.connection;
  for (const notice of model.notices.slice(-3)) {
    banner.appendChild(el("div", "notice", notice));
  }
  return banner;
}

function renderTimeline(model: ConsoleViewModel): HTMLElement {
  const list = el("ol", "timeline");
  for (const entry of model.timeline) {
    const item = el("li", `entry entry-${entry.kind}`);
    if (entry.kind === "stage") {
      item.appendChild(el("span", "stage-marker", entry.text));
    } else {
      item.appendChild(el("span", "speaker", entry.kind === "user" ? "you" : "agent"));
      item.appendChild(el("p", "entry-text", entry.text));
    }
    list.appendChild(item);
  }
  return list;
}

function renderStrategyCards(model: ConsoleViewModel, handlers: Handlers): HTMLElement {
  const section = el("section", "strategies");
  section.appendChild(el("h2", undefined, "Pick an approach"));
  model.strategies.forEach((approach, index) => {
    const card = el("article", "strategy-card");
    card.dataset.index = String(index);
    card.appendChild(el("h3", undefined, approach.name));
    card.appendChild(el("p", undefined, `Light: ${approach.light}`));
    card.appendChild(el("p", undefined, `Color: ${approach.color}`));
    card.appendChild(el("p", undefined, `Mixer: ${approach.mixer_notes}`));
    const button = el("button", "select", "Use this approach") as HTMLButtonElement;
    button.onclick = () => handlers.onSelectApproach(index);
    card.appendChild(button);
    section.appendChild(card);
  });
  const free = el("div", "free-direction");
  const input = el("input") as HTMLInputElement;
  input.placeholder = "...or type your own direction";
  const send = el("button", undefined, "Send") as HTMLButtonElement;
  send.onclick = () => {
    if (input.value.trim()) handlers.onFreeDirection(input.value.trim());
  };
  free.append(input, send);
  section.appendChild(free);
  return section;
}

/** Style references feed the planning stage: a reference image alone
 * is parsed for its style; adding a parameter JSON turns it into a
 * worked reference case. Available until the plan is settled. */
function renderReferenceUpload(handlers: Handlers): HTMLElement {
  const section = el("section", "reference-upload");
  section.appendChild(el("h3", undefined, "Style reference (optional)"));
  const input = el("input", "reference-file") as HTMLInputElement;
  input.type = "file";
  input.accept = "image/png,image/jpeg";
  const paramsBox = el("textarea", "reference-params") as HTMLTextAreaElement;
  paramsBox.placeholder = "optional: the parameter JSON that produced the reference";
  const send = el("button", "reference-send", "Attach reference") as HTMLButtonElement;
  send.onclick = () => {
    const file = input.files?.[0];
    if (!file) return;
    handlers.onReference(file, paramsBox.value.trim() || undefined);
  };
  section.append(input, paramsBox, send);
  return section;
}

function renderControls(model: ConsoleViewModel, handlers: Handlers): HTMLElement {
  const bar = el("div", "controls");
  // step is the default action; auto-run is the opt-in escape hatch
  const step = el("button", "run-step primary", "Step") as HTMLButtonElement;
  step.onclick = () => handlers.onRun("step");
  const auto = el("button", "run-auto", "Run to completion") as HTMLButtonElement;
  auto.onclick = () => handlers.onRun("auto");
  const terminal = model.stage === "done" || model.stage === "failed";
  step.disabled = terminal || model.stage === "await_user_direction";
  auto.disabled = terminal;
  bar.append(step, auto);
  return bar;
}

function renderIterationPanel(model: ConsoleViewModel, panel: IterationPanel,
                              handlers: Handlers): HTMLElement {
  const section = el("article", "iteration-panel");
  section.dataset.iteration = String(panel.index);
  const header = el("header");
  header.appendChild(el("h3", undefined, `Iteration ${panel.index}`));
  if (panel.verdict) {
    const badge = el("span",
      `verdict-badge ${panel.verdict.satisfactory ? "ok" : "retry"}`,
      panel.verdict.satisfactory ? "satisfactory" : "not satisfactory");
    badge.title = panel.verdict.critique;
    header.appendChild(badge);
  }
  section.appendChild(header);

  if (panel.imageDigest) {
    section.appendChild(renderCompare(
      handlers.sourceImageUrl(), handlers.iterationImageUrl(panel.index)));
    const histogram = el("img", "histogram-plot") as HTMLImageElement;
    histogram.src = handlers.iterationHistogramUrl(panel.index);
    histogram.alt = `Iteration ${panel.index} histogram`;
    section.appendChild(histogram);
  }
  if (panel.params) {
    const previous = model.panels.find((p) => p.index === panel.index - 1)?.params ?? null;
    section.appendChild(renderParamsTable(panel.params, previous, panel.changedFields));
  }
  return section;
}

/** Before/after comparison: the rendered image sits on top of the
 * source and a range input controls how much of it is revealed. */
function renderCompare(sourceUrl: string, renderedUrl: string): HTMLElement {
  const wrap = el("div", "compare");
  const before = el("img", "compare-before") as HTMLImageElement;
  before.src = sourceUrl;
  before.alt = "source image";
  const after = el("img", "compare-after") as HTMLImageElement;
  after.src = renderedUrl;
  after.alt = "rendered image";
  after.style.clipPath = "inset(0 0 0 50%)";
  const slider = el("input", "compare-slider") as HTMLInputElement;
  slider.type = "range";
  slider.min = "0";
  slider.max = "100";
  slider.value = "50";
  slider.oninput = () => {
    after.style.clipPath = `inset(0 0 0 ${slider.value}%)`;
  };
  wrap.append(before, after, slider);
  return wrap;
}

function formatValue(path: string, value: number): string {
  // verbatim server numbers; temp reads as Kelvin
  return path === "temp" ? `${value}K` : String(value);
}

export function renderParamsTable(params: ParamSet, previous: ParamSet | null,
                                  changedFields: string[]): HTMLElement {
  const changed = new Set(changedFields);
  const table = el("table", "params-table");
  const tbody = el("tbody");

  const addRow = (path: string, label: string) => {
    const value = getField(params, path);
    const row = el("tr");
    row.dataset.path = path;
    row.appendChild(el("td", "param-name", label));
    const cell = el("td", "param-value");
    if (changed.has(path) && previous) {
      const oldValue = getField(previous, path);
      cell.appendChild(el("span", "old-value", formatValue(path, oldValue)));
      cell.appendChild(el("span", "arrow", " -> "));
      cell.appendChild(el("span", "new-value", formatValue(path, value)));
      row.classList.add("changed");
    } else {
      cell.textContent = formatValue(path, value);
    }
    row.appendChild(cell);
    tbody.appendChild(row);
  };

  for (const field of BASIC_FIELDS) {
    addRow(field, field);
  }
  for (const channel of MIXER_CHANNELS) {
    for (const component of MIXER_COMPONENTS) {
      const path = `mixer.${channel}.${component}`;
      const current = getField(params, path);
      const before = previous ? getField(previous, path) : 0;
      // keep the table compact: only channels that are in play
      if (current !== 0 || before !== 0) {
        addRow(path, `${channel} ${component}`);
      }
    }
  }
  table.appendChild(tbody);
  return table;
}
