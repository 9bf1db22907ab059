/** Thin typed client over the CPD service HTTP API.
 *
 * Every failure becomes an ApiError with an explicit, user-displayable
 * message; the UI never silently falls back to stale results.
 */

import type {
  CheckResult,
  Diagram,
  DiagramSummary,
  ElementKind,
  GlossaryEntry,
  Point,
  SuggestionResult,
  WizardSession,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly kind: "network" | "http",
    readonly status?: number,
    readonly errorCode?: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = typeof fetch;

export class CpdApi {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    parse: "json" | "text" | "none" = "json",
  ): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method,
        headers: body === undefined ? {} : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new ApiError(
        `CPD service unreachable at ${this.baseUrl} (${String(cause)})`,
        "network",
      );
    }
    if (!response.ok) {
      let message = `${method} ${path} failed with status ${response.status}`;
      let errorCode: string | undefined;
      try {
        const detail = (await response.json()).detail;
        if (typeof detail === "string") {
          message = detail;
        } else if (detail && typeof detail === "object") {
          errorCode = detail.error;
          message = detail.message ?? message;
        }
      } catch {
        // keep the generic message
      }
      throw new ApiError(message, "http", response.status, errorCode);
    }
    if (parse === "none") {
      return undefined as T;
    }
    return (parse === "json" ? response.json() : response.text()) as Promise<T>;
  }

  // -- diagrams ----------------------------------------------------------

  listDiagrams(): Promise<DiagramSummary[]> {
    return this.request("GET", "/diagrams");
  }

  getDiagram(id: string): Promise<Diagram> {
    return this.request("GET", `/diagrams/${encodeURIComponent(id)}`);
  }

  createDiagram(diagram: Partial<Diagram>): Promise<Diagram> {
    return this.request("POST", "/diagrams", diagram);
  }

  putDiagram(diagram: Diagram): Promise<Diagram> {
    return this.request(
      "PUT",
      `/diagrams/${encodeURIComponent(diagram.id)}`,
      diagram,
    );
  }

  deleteDiagram(id: string): Promise<void> {
    return this.request("DELETE", `/diagrams/${encodeURIComponent(id)}`, undefined, "none");
  }

  checkDiagram(id: string): Promise<CheckResult> {
    return this.request("POST", `/diagrams/${encodeURIComponent(id)}/check`);
  }

  layoutDiagram(id: string, anchor?: Point): Promise<Diagram> {
    return this.request(
      "POST",
      `/diagrams/${encodeURIComponent(id)}/layout`,
      anchor ? { anchor } : {},
    );
  }

  exportDiagram(id: string, format: "dot" | "svg"): Promise<string> {
    return this.request(
      "GET",
      `/diagrams/${encodeURIComponent(id)}/export?format=${format}`,
      undefined,
      "text",
    );
  }

  // -- wizard ------------------------------------------------------------

  startWizard(distalHint?: string): Promise<WizardSession> {
    return this.request(
      "POST",
      "/wizard/sessions",
      distalHint ? { distal_hint: distalHint } : {},
    );
  }

  getWizardSession(id: string): Promise<WizardSession> {
    return this.request("GET", `/wizard/sessions/${encodeURIComponent(id)}`);
  }

  wizardSuggest(id: string): Promise<SuggestionResult> {
    return this.request("POST", `/wizard/sessions/${encodeURIComponent(id)}/suggest`);
  }

  wizardAccept(id: string, label: string): Promise<WizardSession> {
    return this.request(
      "POST",
      `/wizard/sessions/${encodeURIComponent(id)}/accept`,
      { label },
    );
  }

  wizardMaterialize(
    id: string,
    anchor: Point,
    boardId?: string,
  ): Promise<Diagram> {
    return this.request(
      "POST",
      `/wizard/sessions/${encodeURIComponent(id)}/materialize`,
      boardId ? { anchor, board_id: boardId } : { anchor },
    );
  }

  // -- brainstorm / glossary ----------------------------------------------

  brainstorm(
    targetKind: ElementKind,
    before?: { kind: ElementKind; label: string },
    after?: { kind: ElementKind; label: string },
  ): Promise<SuggestionResult> {
    const body: Record<string, unknown> = { target_kind: targetKind };
    if (before) body.before = before;
    if (after) body.after = after;
    return this.request("POST", "/brainstorm", body);
  }

  glossary(): Promise<GlossaryEntry[]> {
    return this.request("GET", "/glossary");
  }

  glossaryFor(kind: ElementKind): Promise<GlossaryEntry> {
    return this.request("GET", `/glossary/${kind}`);
  }
}
