/**
 * Typed client for the rolecast service endpoints (/v1).
 *
 * The workbench never computes probabilities itself; everything shown in
 * the UI comes verbatim from these responses.
 */

export interface SpanSpec {
  start: number;
  end: number;
}

export interface TriggerSpec extends SpanSpec {
  type: string;
  subtype: string;
}

export interface CandidateSpec extends SpanSpec {
  entity_type: string;
}

/** One guideline example shown in the probability grid. */
export interface ExampleCandidate {
  context: string;
  trigger: TriggerSpec;
  candidate: CandidateSpec;
  /** Gold role when known; display aid only. */
  goldRole?: string;
}

export interface TemplateDraft {
  id?: string;
  pattern: string;
  category: string;
  scope?: string[];
}

export interface TemplateRecord {
  id: string;
  pattern: string;
  category: string;
  scope?: string[];
}

export interface HypothesisRow {
  role: string;
  template_id: string;
  hypothesis: string;
}

export interface TemplateScore {
  role: string;
  template: string;
  entail: number;
  neutral: number;
  contradict: number;
}

export interface Prediction {
  doc: string;
  event: string;
  entity: string;
  predicted: string;
  score: number;
  scores: TemplateScore[];
  threshold: number;
}

export interface LibraryRecord {
  roles: Record<string, TemplateRecord[]>;
  canonical_map: Record<string, string>;
  metadata: { developer?: string; elapsed_seconds_per_role?: Record<string, number> };
}

export interface SessionTimers {
  id: string;
  timers: Record<string, number>;
  budget_seconds: number;
}

export class ServiceError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ServiceError";
  }
}

/** What the workbench needs from the service; ServiceClient implements it
 * over HTTP and tests substitute in-memory fakes. */
export interface ServiceApi {
  health(): Promise<{ status: string }>;
  verbalize(example: ExampleCandidate, roles?: string[]): Promise<{ hypotheses: HypothesisRow[] }>;
  predict(example: ExampleCandidate, roles?: string[]): Promise<Prediction>;
  getLibrary(): Promise<LibraryRecord>;
  getRoleTemplates(role: string): Promise<{ role: string; templates: TemplateRecord[] }>;
  putRoleTemplates(
    role: string,
    templates: TemplateDraft[],
  ): Promise<{ role: string; templates: TemplateRecord[] }>;
  createSession(): Promise<{ id: string; budget_seconds: number }>;
  heartbeat(sessionId: string, role: string, seconds: number): Promise<SessionTimers>;
  timers(sessionId: string): Promise<SessionTimers>;
}

function exampleBody(example: ExampleCandidate, roles?: string[]): Record<string, unknown> {
  const body: Record<string, unknown> = {
    context: example.context,
    trigger: example.trigger,
    candidate: example.candidate,
  };
  if (roles !== undefined) body.roles = roles;
  return body;
}

export class ServiceClient implements ServiceApi {
  constructor(private baseUrl: string, private fetchImpl: typeof fetch = fetch) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body !== undefined ? { "Content-Type": "application/json" } : undefined,
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    const text = await response.text();
    let parsed: unknown = null;
    try {
      parsed = text ? JSON.parse(text) : null;
    } catch {
      parsed = null;
    }
    if (!response.ok) {
      const detail =
        parsed && typeof parsed === "object" && "error" in parsed
          ? String((parsed as { error: unknown }).error)
          : `${response.status}`;
      throw new ServiceError(response.status, detail);
    }
    return parsed as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/v1/health");
  }

  verbalize(example: ExampleCandidate, roles?: string[]): Promise<{ hypotheses: HypothesisRow[] }> {
    return this.request("POST", "/v1/verbalize", exampleBody(example, roles));
  }

  predict(example: ExampleCandidate, roles?: string[]): Promise<Prediction> {
    return this.request("POST", "/v1/predict", exampleBody(example, roles));
  }

  getLibrary(): Promise<LibraryRecord> {
    return this.request("GET", "/v1/templates");
  }

  getRoleTemplates(role: string): Promise<{ role: string; templates: TemplateRecord[] }> {
    return this.request("GET", `/v1/templates/${encodeURIComponent(role)}`);
  }

  putRoleTemplates(
    role: string,
    templates: TemplateDraft[],
  ): Promise<{ role: string; templates: TemplateRecord[] }> {
    return this.request("PUT", `/v1/templates/${encodeURIComponent(role)}`, { templates });
  }

  createSession(): Promise<{ id: string; budget_seconds: number }> {
    return this.request("POST", "/v1/sessions", {});
  }

  heartbeat(sessionId: string, role: string, seconds: number): Promise<SessionTimers> {
    return this.request("POST", `/v1/sessions/${sessionId}/heartbeat`, { role, seconds });
  }

  timers(sessionId: string): Promise<SessionTimers> {
    return this.request("GET", `/v1/sessions/${sessionId}/timers`);
  }
}
