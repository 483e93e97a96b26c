/** Drives a real annotation service session to completion through the UI's
 * own client and controller, answering from ground truth. */

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionController } from "../src/state.js";

const PY = process.env.PYTHON ?? "python3";
const PORT = 8731 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;

let work: string;
let dataDir: string;
let service: ChildProcess;

interface TreeNode {
  name: string;
  children?: TreeNode[];
}

/** name -> set of leaf names underneath (the oracle's view of composites) */
function leafSets(node: TreeNode, out: Map<string, Set<string>>): Set<string> {
  if (!node.children) {
    const s = new Set([node.name]);
    out.set(node.name, s);
    return s;
  }
  const s = new Set<string>();
  for (const kid of node.children) {
    for (const leaf of leafSets(kid, out)) s.add(leaf);
  }
  out.set(node.name, s);
  return s;
}

async function waitHealthy(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const r = await fetch(`${BASE}/healthz`);
      if (r.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  throw new Error("service never became healthy");
}

beforeAll(async () => {
  work = mkdtempSync(join(tmpdir(), "querylearn-e2e-"));
  dataDir = join(work, "data");
  const gen = spawnSync(
    PY,
    ["-m", "querylearn", "gen-data", "--k", "4", "--d", "6", "--n", "20", "--n-holdout", "8", "--seed", "1", "--out", dataDir],
    { stdio: "inherit" },
  );
  expect(gen.status).toBe(0);
  service = spawn(PY, ["-m", "querylearn", "serve", "--port", String(PORT), "--session-dir", join(work, "sessions")], {
    stdio: "ignore",
  });
  await waitHealthy();
}, 120_000);

afterAll(() => {
  service?.kill("SIGKILL");
});

describe("live annotation session", () => {
  it("drives a 20-example session to complete and mirrors the metrics", async () => {
    const truthNames = readFileSync(join(dataDir, "labels.csv"), "utf-8")
      .trim()
      .split("\n");
    const tree = JSON.parse(readFileSync(join(dataDir, "hierarchy.json"), "utf-8")) as TreeNode;
    const sets = new Map<string, Set<string>>();
    leafSets(tree, sets);

    const api = new ApiClient(BASE);
    const created = await api.createSession(dataDir, {
      mode: "alpf-erc",
      warm_start_fraction: 0.1,
      retrain_interval: 30,
      seed: 5,
      epochs: 3,
    });
    expect(created.session_id).toBeTruthy();
    expect(created.question?.prompt).toContain(created.question?.composite_name ?? "?");

    const controller = new SessionController(api, created.session_id, 30);
    await controller.refresh();
    let safety = 0;
    while (!["complete", "exhausted"].includes(controller.current.status)) {
      expect(safety++).toBeLessThan(5000);
      const view = controller.current;
      if (view.status === "retraining" || view.status === "connecting") {
        await new Promise((r) => setTimeout(r, 40));
        await controller.refresh();
        continue;
      }
      if (view.status === "error") throw new Error(view.error ?? "unknown error");
      const q = view.question;
      if (!q) {
        await controller.refresh();
        continue;
      }
      // the human-side oracle: answer from the true label of the shown example
      const truth = truthNames[q.example_index]; // train rows come first
      const members = sets.get(q.composite_name);
      expect(members).toBeDefined();
      await controller.answer(members!.has(truth) ? 1 : 0);
    }
    controller.stop();

    expect(controller.current.status).toBe("complete");
    const metrics = await api.getMetrics(created.session_id);
    // the view's progress numbers are exactly the service's live counters
    expect(controller.current.progress).toEqual(metrics.live);
    expect(metrics.live.fraction_exact).toBe(1.0);
    expect(metrics.rounds.length).toBeGreaterThan(0);
  }, 180_000);
});
