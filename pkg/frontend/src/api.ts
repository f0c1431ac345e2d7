/** Typed client for the lexforge /v1 JSON API. */

export interface SectionPayload {
  kind: string;
  heading?: string | null;
  paragraphs: string[];
}

export interface AcceptedDefinition {
  term: string;
  text: string;
  provenance: "cited" | "generated";
}

export interface SessionView {
  session_id: string;
  title: string;
  eurovoc: string[];
  sections: SectionPayload[];
  accepted_definitions: AcceptedDefinition[];
}

export interface Candidate {
  id: string;
  term: string;
  explanation: string;
  kind: "static" | "dynamic";
  celex: string;
  article_heading: string;
  point_label: string | null;
  references: string[];
  descriptor_overlap: number;
  jaccard: number;
  source_year: number;
}

export type LookupCase = "NotFound" | "Single" | "Multiple";

export interface LookupOutcome {
  case: LookupCase;
  candidates: Candidate[];
}

export interface GenerationResult {
  term: string;
  definition: string;
  word_count: number;
  length_ok: boolean;
  warnings: string[];
}

export interface ApiError {
  code: string;
  message: string;
}

export class ServiceError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
  }
}

async function unwrap<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let code = `HTTP${resp.status}`;
    let message = resp.statusText;
    try {
      const body = (await resp.json()) as ApiError;
      code = body.code ?? code;
      message = body.message ?? message;
    } catch {
      // non-JSON error body; keep defaults
    }
    throw new ServiceError(code, message, resp.status);
  }
  return (await resp.json()) as T;
}

export class LexforgeApi {
  constructor(private readonly baseUrl: string) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}/v1${path}`;
  }

  async createSession(
    title: string,
    eurovoc: string[],
    sections: SectionPayload[],
  ): Promise<SessionView> {
    const resp = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ title, eurovoc, sections }),
    });
    return unwrap<SessionView>(resp);
  }

  async getSession(sessionId: string): Promise<SessionView> {
    return unwrap<SessionView>(await fetch(this.url(`/sessions/${sessionId}`)));
  }

  async lookupTerm(sessionId: string, term: string): Promise<LookupOutcome> {
    const resp = await fetch(
      this.url(`/sessions/${sessionId}/terms/${encodeURIComponent(term)}`),
    );
    return unwrap<LookupOutcome>(resp);
  }

  async generate(sessionId: string, term: string): Promise<GenerationResult> {
    const resp = await fetch(
      this.url(`/sessions/${sessionId}/terms/${encodeURIComponent(term)}/generate`),
      { method: "POST" },
    );
    return unwrap<GenerationResult>(resp);
  }

  async acceptDefinition(
    sessionId: string,
    entry: AcceptedDefinition,
  ): Promise<SessionView> {
    const resp = await fetch(this.url(`/sessions/${sessionId}/definitions`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(entry),
    });
    return unwrap<SessionView>(resp);
  }

  async getArticle(sessionId: string): Promise<string> {
    const resp = await fetch(this.url(`/sessions/${sessionId}/article`));
    if (!resp.ok) {
      throw new ServiceError(`HTTP${resp.status}`, resp.statusText, resp.status);
    }
    return resp.text();
  }
}
