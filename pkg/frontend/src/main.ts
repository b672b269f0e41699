/** Console wiring: upload, event subscription, steering, rendering. */

import { SessionApi, isApiError } from "./api.js";
import { renderConsole } from "./dom.js";
import { subscribeEvents } from "./sse.js";
import {
  ConsoleViewModel,
  addNotice,
  applyEvent,
  emptyViewModel,
  setConnection,
  setStrategies,
} from "./viewmodel.js";

const api = new SessionApi("");

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

let model: ConsoleViewModel | null = null;

function redraw(): void {
  if (!model) return;
  const current = model;
  renderConsole(byId("console"), current, {
    onSelectApproach: (index) => {
      api.postDirection(current.sessionId, { approach_index: index })
        .then((doc) => {
          setStrategies(current, doc.strategies, doc.chosen_approach);
          redraw();
        })
        .catch(reportError);
    },
    onFreeDirection: (text) => {
      api.postDirection(current.sessionId, { text }).then(() => redraw()).catch(reportError);
    },
    onRun: (mode) => {
      api.run(current.sessionId, mode)
        .then((doc) => {
          setStrategies(current, doc.strategies, doc.chosen_approach);
          redraw();
        })
        .catch(reportError);
    },
    onReference: (image, paramsJson) => {
      api.uploadReference(current.sessionId, image, image.name, paramsJson)
        .then((result) => {
          addNotice(current, `Reference attached: ${result.directive}`);
          redraw();
        })
        .catch(reportError);
    },
    iterationImageUrl: (index) => api.iterationImageUrl(current.sessionId, index),
    iterationHistogramUrl: (index) => api.iterationHistogramUrl(current.sessionId, index),
    sourceImageUrl: () => api.sourceImageUrl(current.sessionId),
  });
}

function reportError(err: unknown): void {
  if (!model) return;
  // service refusals (wrong stage and friends) surface inline
  addNotice(model, isApiError(err) ? `${err.status}: ${err.detail}` : String(err));
  redraw();
}

function attach(sessionId: string): void {
  model = emptyViewModel(sessionId);
  api.getSession(sessionId).then((doc) => {
    if (!model) return;
    setStrategies(model, doc.strategies, doc.chosen_approach);
    redraw();
  }).catch(reportError);
  subscribeEvents(
    api.eventsUrl(sessionId),
    (event) => {
      if (!model) return;
      applyEvent(model, event);
      if (event.type === "stage_entered" && event.stage === "await_user_direction") {
        api.getSession(sessionId).then((doc) => {
          if (!model) return;
          setStrategies(model, doc.strategies, doc.chosen_approach);
          redraw();
        }).catch(reportError);
      }
      redraw();
    },
    (state) => {
      if (!model) return;
      setConnection(model, state);
      redraw();
    },
  );
  byId<HTMLElement>("upload-panel").hidden = true;
}

function wireUpload(): void {
  const form = byId<HTMLFormElement>("upload-form");
  form.onsubmit = (submit) => {
    submit.preventDefault();
    const fileInput = byId<HTMLInputElement>("image-input");
    const instruction = byId<HTMLInputElement>("instruction-input").value.trim();
    const file = fileInput.files?.[0];
    if (!file) return;
    api.createSession(file, file.name, instruction || undefined)
      .then((doc) => {
        const url = new URL(window.location.href);
        url.searchParams.set("session", doc.session_id);
        window.history.replaceState(null, "", url.toString());
        attach(doc.session_id);
      })
      .catch((err) => {
        const panel = byId<HTMLElement>("upload-error");
        panel.textContent = isApiError(err) ? err.detail : String(err);
      });
  };
}

window.addEventListener("DOMContentLoaded", () => {
  wireUpload();
  const existing = new URL(window.location.href).searchParams.get("session");
  if (existing) {
    attach(existing);
  }
});
