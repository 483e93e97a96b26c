/** Bootstrap: join the session named in the URL hash, or show a create form. */

import { ApiClient } from "./api.js";
import { SessionController } from "./state.js";
import { render } from "./ui.js";

const api = new ApiClient("");
const root = document.getElementById("app")!;

function runSession(sessionId: string): void {
  window.location.hash = sessionId;
  const controller = new SessionController(api, sessionId);
  const handlers = { onAnswer: (v: 0 | 1) => void controller.answer(v) };
  controller.onChange((view) => {
    render(root, view, handlers);
    const retry = document.getElementById("retry");
    if (retry) retry.onclick = () => void controller.refresh();
  });
  document.addEventListener("keydown", (ev) => {
    if (ev.key === "y" || ev.key === "Y") void controller.answer(1);
    if (ev.key === "n" || ev.key === "N") void controller.answer(0);
  });
  void controller.refresh();
}

function createForm(): void {
  root.replaceChildren();
  const card = document.createElement("div");
  card.className = "card";
  card.innerHTML = `
    <h2>Start an annotation session</h2>
    <label>Dataset <input id="data" value="synth4"></label>
    <label>Mode
      <select id="mode">
        <option>alpf-erc</option><option>alpf-edc</option><option>alpf-eig</option>
        <option>aq-erc</option><option>aq-edc</option><option>aq-eig</option>
        <option>al-me</option><option>al-lc</option><option>baseline</option>
      </select>
    </label>
    <label>Re-train every <input id="interval" type="number" value="50"> questions</label>
    <label>Budget <input id="budget" placeholder="unlimited"></label>
    <label>Seed <input id="seed" type="number" value="0"></label>
    <button id="create">Create session</button>
    <p id="create-error" class="status error"></p>
  `;
  root.appendChild(card);
  document.getElementById("create")!.onclick = async () => {
    const val = (id: string) => (document.getElementById(id) as HTMLInputElement).value;
    const budget = val("budget").trim();
    try {
      const resp = await api.createSession(val("data"), {
        mode: val("mode"),
        retrain_interval: Number(val("interval")),
        budget: budget === "" ? null : Number(budget),
        seed: Number(val("seed")),
      });
      runSession(resp.session_id);
    } catch (err) {
      document.getElementById("create-error")!.textContent = String(err);
    }
  };
}

const fromHash = window.location.hash.replace(/^#/, "");
if (fromHash) runSession(fromHash);
else createForm();
