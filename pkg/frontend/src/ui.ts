/** DOM rendering for the annotator screen. */

import { Progress } from "./api.js";
import { renderGlyph } from "./glyph.js";
import { SessionView } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function fmt(x: number | null | undefined, digits = 3): string {
  return x === null || x === undefined ? "–" : x.toFixed(digits);
}

function progressPanel(progress: Progress | null): HTMLElement {
  const panel = el("div", "progress-panel");
  if (!progress) return panel;
  const rows: [string, string][] = [
    ["questions asked", String(progress.questions_asked)],
    ["budget", progress.budget === null ? "unlimited" : String(progress.budget)],
    ["exactly labeled", `${(progress.fraction_exact * 100).toFixed(1)}%`],
    ["mean classes left", fmt(progress.mean_remaining, 2)],
    ["holdout accuracy", fmt(progress.accuracy)],
    ["training rounds", String(progress.rounds_completed)],
  ];
  for (const [label, value] of rows) {
    const row = el("div", "stat-row");
    row.appendChild(el("span", "stat-label", label));
    row.appendChild(el("span", "stat-value", value));
    panel.appendChild(row);
  }
  const bar = el("div", "bar");
  const fill = el("div", "bar-fill");
  fill.style.width = `${Math.round(progress.fraction_exact * 100)}%`;
  bar.appendChild(fill);
  panel.appendChild(bar);
  if (progress.budget !== null && progress.budget > 0) {
    const spent = el("div", "bar budget");
    const sfill = el("div", "bar-fill spent");
    sfill.style.width = `${Math.min(100, Math.round((progress.questions_asked / progress.budget) * 100))}%`;
    spent.appendChild(sfill);
    panel.appendChild(spent);
  }
  return panel;
}

export interface UiHandlers {
  onAnswer: (value: 0 | 1) => void;
}

export function render(root: HTMLElement, view: SessionView, handlers: UiHandlers): void {
  root.replaceChildren();
  const card = el("div", "card");
  card.appendChild(el("div", "session-id", `session ${view.sessionId}`));

  if (view.status === "connecting") {
    card.appendChild(el("p", "status", "connecting…"));
  } else if (view.status === "error") {
    card.appendChild(el("p", "status error", view.error ?? "request failed"));
    const retry = el("button", "retry", "Retry");
    retry.id = "retry";
    card.appendChild(retry);
  } else if (view.status === "retraining") {
    card.appendChild(el("p", "status", "re-training the classifier…"));
    card.appendChild(el("div", "spinner"));
  } else if (view.status === "complete" || view.status === "exhausted") {
    const headline = view.status === "complete" ? "All examples exactly labeled." : "Question budget exhausted.";
    card.appendChild(el("p", "status done", headline));
  } else if (view.question) {
    const q = view.question;
    const display = el("div", "display");
    if (q.display.kind === "image" && q.display.path) {
      const img = el("img");
      img.src = q.display.path;
      img.alt = `example ${q.example_index}`;
      display.appendChild(img);
    } else if (q.display.values) {
      const canvas = el("canvas", "glyph");
      canvas.width = 320;
      canvas.height = 80;
      display.appendChild(canvas);
      renderGlyph(canvas, q.display.values);
    }
    card.appendChild(display);
    card.appendChild(el("p", "prompt", q.prompt));
    const buttons = el("div", "answers");
    const yes = el("button", "yes", "Yes (Y)");
    yes.id = "answer-yes";
    yes.disabled = view.busy;
    yes.onclick = () => handlers.onAnswer(1);
    const no = el("button", "no", "No (N)");
    no.id = "answer-no";
    no.disabled = view.busy;
    no.onclick = () => handlers.onAnswer(0);
    buttons.appendChild(yes);
    buttons.appendChild(no);
    card.appendChild(buttons);
  } else {
    card.appendChild(el("p", "status", "waiting for the next question…"));
  }

  card.appendChild(progressPanel(view.progress));
  root.appendChild(card);
}
