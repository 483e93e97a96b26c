/** Session view state machine.
 *
 * Mirrors the service exactly: every number shown comes from a service
 * response, a submission is only ever issued against the held pending
 * question id, and an in-flight guard turns double-clicks into one request.
 * While the service re-trains, a 1 s poll keeps the view fresh.
 */

import { ApiClient, ApiError, Progress, QuestionPayload, SessionStatus } from "./api.js";

export interface SessionView {
  sessionId: string;
  status: SessionStatus | "connecting" | "error";
  question: QuestionPayload | null;
  progress: Progress | null;
  busy: boolean;
  error: string | null;
}

type Listener = (view: SessionView) => void;

export class SessionController {
  private view: SessionView;
  private listeners: Listener[] = [];
  private pollTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private api: ApiClient,
    sessionId: string,
    public pollIntervalMs = 1000,
  ) {
    this.view = {
      sessionId,
      status: "connecting",
      question: null,
      progress: null,
      busy: false,
      error: null,
    };
  }

  get current(): SessionView {
    return this.view;
  }

  onChange(fn: Listener): void {
    this.listeners.push(fn);
  }

  private update(patch: Partial<SessionView>): void {
    this.view = { ...this.view, ...patch };
    for (const fn of this.listeners) fn(this.view);
  }

  async refresh(): Promise<void> {
    try {
      const resp = await this.api.getQuestion(this.view.sessionId);
      this.update({
        status: resp.status,
        question: resp.question,
        progress: resp.progress,
        error: null,
      });
      if (resp.status === "retraining") this.schedulePoll();
    } catch (err) {
      this.update({ status: "error", error: describe(err) });
    }
  }

  /** Submit the pending answer. No-ops unless a question is held and no
   * request is in flight; a conflict means our question went stale, so we
   * re-fetch instead of surfacing an error. */
  async answer(value: 0 | 1): Promise<void> {
    const q = this.view.question;
    if (!q || this.view.busy) return;
    this.update({ busy: true, error: null });
    try {
      const resp = await this.api.submitAnswer(this.view.sessionId, q.question_id, value);
      this.update({ busy: false, status: resp.status, progress: resp.progress, question: null });
      if (resp.status === "retraining") {
        this.schedulePoll();
      } else if (resp.status === "active") {
        await this.refresh();
      }
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.update({ busy: false, question: null });
        await this.refresh();
        return;
      }
      // network failure: keep the pending question so a retry resubmits it
      this.update({ busy: false, error: describe(err) });
    }
  }

  private schedulePoll(): void {
    if (this.pollTimer) return;
    this.pollTimer = setTimeout(async () => {
      this.pollTimer = null;
      if (this.view.status === "retraining") await this.refresh();
    }, this.pollIntervalMs);
  }

  stop(): void {
    if (this.pollTimer) {
      clearTimeout(this.pollTimer);
      this.pollTimer = null;
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  if (err instanceof Error) return err.message;
  return String(err);
}
