// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { Progress } from "../src/api.js";
import { render } from "../src/ui.js";
import { SessionView } from "../src/state.js";

const progress: Progress = {
  questions_asked: 42,
  budget: 120,
  fraction_exact: 0.35,
  mean_remaining: 2.21,
  accuracy: 0.731,
  rounds_completed: 3,
  status: "active",
};

function view(partial: Partial<SessionView>): SessionView {
  return {
    sessionId: "abc123",
    status: "active",
    question: null,
    progress,
    busy: false,
    error: null,
    ...partial,
  };
}

describe("render", () => {
  it("shows the question prompt with the composite name and progress verbatim", () => {
    const root = document.createElement("div");
    render(
      root,
      view({
        question: {
          question_id: 42,
          example_index: 7,
          composite_index: 2,
          composite_name: "dog",
          prompt: "Is this a dog?",
          display: { kind: "features", values: [1, -0.5] },
        },
      }),
      { onAnswer: () => {} },
    );
    expect(root.textContent).toContain("Is this a dog?");
    expect(root.textContent).toContain("42"); // questions asked, from the service
    expect(root.textContent).toContain("35.0%"); // fraction exact
    expect(root.textContent).toContain("0.731"); // holdout accuracy
    expect(root.querySelector<HTMLButtonElement>("#answer-yes")?.disabled).toBe(false);
  });

  it("disables controls while a submission is in flight", () => {
    const root = document.createElement("div");
    render(
      root,
      view({
        busy: true,
        question: {
          question_id: 1,
          example_index: 0,
          composite_index: 0,
          composite_name: "all",
          prompt: "Is this a all?",
          display: { kind: "features", values: [0] },
        },
      }),
      { onAnswer: () => {} },
    );
    expect(root.querySelector<HTMLButtonElement>("#answer-yes")?.disabled).toBe(true);
    expect(root.querySelector<HTMLButtonElement>("#answer-no")?.disabled).toBe(true);
  });

  it("shows a polling indicator while retraining", () => {
    const root = document.createElement("div");
    render(root, view({ status: "retraining" }), { onAnswer: () => {} });
    expect(root.querySelector(".spinner")).not.toBeNull();
    expect(root.querySelector("#answer-yes")).toBeNull();
  });

  it("shows a summary when complete", () => {
    const root = document.createElement("div");
    render(root, view({ status: "complete" }), { onAnswer: () => {} });
    expect(root.textContent).toContain("All examples exactly labeled");
  });

  it("offers a retry without losing state on errors", () => {
    const root = document.createElement("div");
    render(root, view({ status: "error", error: "fetch failed" }), { onAnswer: () => {} });
    expect(root.textContent).toContain("fetch failed");
    expect(root.querySelector("#retry")).not.toBeNull();
  });
});
