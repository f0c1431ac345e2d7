/** UI state machine for the drafting workflow.
 *
 * State is a pure function of server responses plus the local selection;
 * ranking order and case classification render exactly as received, and
 * every transition waits for server confirmation (no optimistic updates).
 */

import {
  AcceptedDefinition,
  Candidate,
  GenerationResult,
  LexforgeApi,
  LookupOutcome,
  SectionPayload,
  ServiceError,
  SessionView,
} from "./api.js";

export interface UiSessionState {
  sessionId: string | null;
  title: string;
  sections: SectionPayload[];
  selectedTerm: string | null;
  lastLookup: LookupOutcome | null;
  pendingGeneration: GenerationResult | null;
  acceptedDefinitions: AcceptedDefinition[];
  articlePreview: string;
  error: string | null;
}

export function initialState(): UiSessionState {
  return {
    sessionId: null,
    title: "",
    sections: [],
    selectedTerm: null,
    lastLookup: null,
    pendingGeneration: null,
    acceptedDefinitions: [],
    articlePreview: "",
    error: null,
  };
}

/** Only whitespace is normalized client-side; the server owns term normalization. */
export function normalizeSelection(selection: string): string {
  return selection.replace(/\s+/g, " ").trim();
}

export class DraftingController {
  state: UiSessionState = initialState();
  private inFlightLookup: string | null = null;

  constructor(private readonly api: LexforgeApi) {}

  private applySession(session: SessionView): void {
    this.state.sessionId = session.session_id;
    this.state.title = session.title;
    this.state.sections = session.sections;
    this.state.acceptedDefinitions = session.accepted_definitions;
  }

  private requireSession(): string {
    if (!this.state.sessionId) {
      throw new Error("no active session");
    }
    return this.state.sessionId;
  }

  async createSession(
    title: string,
    eurovoc: string[],
    sections: SectionPayload[],
  ): Promise<void> {
    const session = await this.api.createSession(title, eurovoc, sections);
    this.applySession(session);
    await this.refreshArticle();
  }

  /** Reconstruct the full state from the server, as a page reload would. */
  async load(sessionId: string): Promise<void> {
    const session = await this.api.getSession(sessionId);
    this.state = initialState();
    this.applySession(session);
    await this.refreshArticle();
  }

  get canAccept(): boolean {
    return (
      this.state.pendingGeneration !== null ||
      (this.state.lastLookup !== null && this.state.lastLookup.candidates.length > 0)
    );
  }

  async selectTerm(selection: string): Promise<LookupOutcome | null> {
    const term = normalizeSelection(selection);
    if (!term) {
      return null;
    }
    const sessionId = this.requireSession();
    // de-duplicate in-flight lookups per (session, term)
    if (this.inFlightLookup === `${sessionId}:${term}`) {
      return this.state.lastLookup;
    }
    this.inFlightLookup = `${sessionId}:${term}`;
    try {
      const outcome = await this.api.lookupTerm(sessionId, term);
      this.state.selectedTerm = term;
      this.state.lastLookup = outcome;
      this.state.pendingGeneration = null;
      this.state.error = null;
      return outcome;
    } catch (err) {
      this.state.error = err instanceof ServiceError ? err.message : String(err);
      throw err;
    } finally {
      this.inFlightLookup = null;
    }
  }

  async requestGeneration(): Promise<GenerationResult> {
    const sessionId = this.requireSession();
    const term = this.state.selectedTerm;
    if (!term) {
      throw new Error("no term selected");
    }
    try {
      const result = await this.api.generate(sessionId, term);
      this.state.pendingGeneration = result;
      this.state.error = null;
      return result;
    } catch (err) {
      this.state.error = err instanceof ServiceError ? err.message : String(err);
      throw err;
    }
  }

  discardPending(): void {
    this.state.pendingGeneration = null;
  }

  async acceptCandidate(candidate: Candidate): Promise<void> {
    const term = this.state.selectedTerm ?? candidate.term;
    await this.acceptAndPreview({
      term,
      text: `'${term}' ${candidate.explanation};`,
      provenance: "cited",
    });
  }

  async acceptPendingGeneration(): Promise<void> {
    const pending = this.state.pendingGeneration;
    if (!pending) {
      throw new Error("no pending generation");
    }
    await this.acceptAndPreview({
      term: pending.term,
      text: pending.definition,
      provenance: "generated",
    });
    this.state.pendingGeneration = null;
  }

  async acceptAndPreview(entry: AcceptedDefinition): Promise<void> {
    const sessionId = this.requireSession();
    try {
      const session = await this.api.acceptDefinition(sessionId, entry);
      this.applySession(session);
      this.state.error = null;
    } catch (err) {
      this.state.error = err instanceof ServiceError ? err.message : String(err);
      throw err;
    }
    await this.refreshArticle();
  }

  async refreshArticle(): Promise<void> {
    this.state.articlePreview = await this.api.getArticle(this.requireSession());
  }
}
