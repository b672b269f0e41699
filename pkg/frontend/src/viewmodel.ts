/** Pure reducer from the session event stream to the console's view
 * model. The timeline mirrors event order exactly; iteration panels
 * highlight precisely the fields that changed since the previous
 * iteration's parameters (the first panel has no highlights). */

import { changedPaths } from "./diff.js";
import { Approach, ParamSet, SessionEvent } from "./types.js";

export type ConnectionState = "connecting" | "open" | "reconnecting" | "closed";

export interface TimelineEntry {
  seq: number;
  kind: "stage" | "agent" | "user";
  stage: string;
  text: string;
}

export interface IterationPanel {
  index: number;
  params: ParamSet | null;
  changedFields: string[];
  imageDigest: string | null;
  verdict: { satisfactory: boolean; critique: string } | null;
}

export interface ConsoleViewModel {
  sessionId: string;
  stage: string;
  timeline: TimelineEntry[];
  strategies: Approach[];
  chosenApproach: number | null;
  panels: IterationPanel[];
  summary: string | null;
  outcome: string | null;
  connection: ConnectionState;
  notices: string[];
  lastSeq: number;
}

export function emptyViewModel(sessionId: string): ConsoleViewModel {
  return {
    sessionId,
    stage: "content_description",
    timeline: [],
    strategies: [],
    chosenApproach: null,
    panels: [],
    summary: null,
    outcome: null,
    connection: "connecting",
    notices: [],
    lastSeq: 0,
  };
}

function panelFor(model: ConsoleViewModel, index: number): IterationPanel {
  let panel = model.panels.find((p) => p.index === index);
  if (!panel) {
    panel = { index, params: null, changedFields: [], imageDigest: null, verdict: null };
    model.panels.push(panel);
    model.panels.sort((a, b) => a.index - b.index);
  }
  return panel;
}

const STAGE_LABELS: Record<string, string> = {
  content_description: "Looking at the image",
  strategy_proposal: "Proposing approaches",
  await_user_direction: "Waiting for your direction",
  final_plan: "Settling the plan",
  tone_analysis: "Reading the histogram",
  param_generation: "Choosing parameters",
  render: "Rendering",
  reflection: "Reflecting",
  summary: "Summing up",
  done: "Done",
  failed: "Failed",
};

export function stageLabel(stage: string): string {
  return STAGE_LABELS[stage] ?? stage;
}

/** Apply one server event. Events must be fed in stream order; stale
 * duplicates (seq <= lastSeq) are ignored so reconnect replays are
 * idempotent. */
export function applyEvent(model: ConsoleViewModel, event: SessionEvent): ConsoleViewModel {
  if (event.seq <= model.lastSeq) {
    return model;
  }
  model.lastSeq = event.seq;
  switch (event.type) {
    case "stage_entered": {
      model.stage = event.stage;
      model.timeline.push({
        seq: event.seq, kind: "stage", stage: event.stage, text: stageLabel(event.stage),
      });
      break;
    }
    case "text_emitted": {
      // direction-gate text is the user speaking; everything else is the agent
      const kind = event.stage === "await_user_direction" ? "user" : "agent";
      model.timeline.push({ seq: event.seq, kind, stage: event.stage, text: event.text });
      if (event.stage === "strategy_proposal") {
        // structured copies of the cards arrive via session state; the
        // timeline keeps the prose form only
      }
      if (event.stage === "summary") {
        model.summary = event.text;
      }
      break;
    }
    case "params_proposed": {
      const panel = panelFor(model, event.iteration);
      panel.params = event.params;
      const previous = model.panels.find((p) => p.index === event.iteration - 1);
      panel.changedFields = previous?.params
        ? changedPaths(previous.params, event.params)
        : [];
      break;
    }
    case "image_rendered": {
      panelFor(model, event.iteration).imageDigest = event.digest;
      break;
    }
    case "verdict": {
      panelFor(model, event.iteration).verdict = {
        satisfactory: event.satisfactory,
        critique: event.critique,
      };
      break;
    }
    case "done": {
      model.outcome = event.outcome;
      break;
    }
  }
  return model;
}

export function applyEvents(model: ConsoleViewModel, events: SessionEvent[]): ConsoleViewModel {
  for (const event of events) {
    applyEvent(model, event);
  }
  return model;
}

export function setStrategies(model: ConsoleViewModel, strategies: Approach[],
                              chosen: number | null): void {
  model.strategies = strategies;
  model.chosenApproach = chosen;
}

export function addNotice(model: ConsoleViewModel, text: string): void {
  model.notices.push(text);
}

export function setConnection(model: ConsoleViewModel, state: ConnectionState): void {
  model.connection = state;
}
