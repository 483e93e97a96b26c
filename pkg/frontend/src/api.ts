/** Typed client for the annotation service HTTP API. */

export type SessionStatus = "active" | "retraining" | "complete" | "exhausted";

export interface DisplayPayload {
  kind: "image" | "features";
  path?: string;
  values?: number[];
}

export interface QuestionPayload {
  question_id: number;
  example_index: number;
  composite_index: number;
  composite_name: string;
  prompt: string;
  display: DisplayPayload;
}

export interface Progress {
  questions_asked: number;
  budget: number | null;
  fraction_exact: number;
  mean_remaining: number;
  accuracy: number | null;
  rounds_completed: number;
  status: SessionStatus;
}

export interface QuestionResponse {
  status: SessionStatus;
  question: QuestionPayload | null;
  progress: Progress;
}

export interface RoundRow {
  questions_asked: number;
  accuracy: number;
  fraction_exact: number;
  mean_remaining: number;
  mean_selected_entropy: number | null;
  selected_class_counts: number[];
}

export interface MetricsResponse {
  rounds: RoundRow[];
  live: Progress;
}

export interface SessionConfig {
  mode?: string;
  warm_start_fraction?: number;
  retrain_interval?: number;
  budget?: number | null;
  seed?: number;
  epochs?: number;
}

export interface CreateSessionResponse {
  session_id: string;
  status: SessionStatus;
  progress: Progress;
  question: QuestionPayload | null;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseError(resp: Response): Promise<never> {
  let detail = resp.statusText;
  try {
    const body = await resp.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    /* non-JSON body */
  }
  throw new ApiError(resp.status, detail);
}

export class ApiClient {
  constructor(private base: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const resp = await fetch(this.base + path);
    if (!resp.ok) await parseError(resp);
    return resp.json() as Promise<T>;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) await parseError(resp);
    return resp.json() as Promise<T>;
  }

  health(): Promise<{ status: string }> {
    return this.get("/healthz");
  }

  createSession(data: string, config: SessionConfig, dataSeed = 0): Promise<CreateSessionResponse> {
    return this.post("/sessions", { data, data_seed: dataSeed, config });
  }

  listSessions(): Promise<{ sessions: string[] }> {
    return this.get("/sessions");
  }

  getQuestion(sessionId: string): Promise<QuestionResponse> {
    return this.get(`/sessions/${sessionId}/question`);
  }

  submitAnswer(sessionId: string, questionId: number, answer: 0 | 1): Promise<{ status: SessionStatus; progress: Progress }> {
    return this.post(`/sessions/${sessionId}/answer`, { question_id: questionId, answer });
  }

  getMetrics(sessionId: string): Promise<MetricsResponse> {
    return this.get(`/sessions/${sessionId}/metrics`);
  }
}
