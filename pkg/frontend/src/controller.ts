/** Board and panel flows, kept free of DOM so they are testable headless.
 *
 * No business logic lives here: validity, suggestions, layout, and the
 * glossary all come from the service. The controllers only edit the board
 * document and persist it through the API.
 */

import { CpdApi } from "./api.js";
import type {
  CheckResult,
  ConnectionKind,
  Diagram,
  DiagramElement,
  ElementKind,
  Point,
  SuggestionResult,
  WizardSession,
} from "./types.js";
import { freshId } from "./types.js";

export class BoardController {
  diagram: Diagram | null = null;

  constructor(
    readonly api: CpdApi,
    readonly boardId: string,
  ) {}

  async load(): Promise<Diagram> {
    this.diagram = await this.api.getDiagram(this.boardId);
    return this.diagram;
  }

  async createIfMissing(title: string): Promise<Diagram> {
    try {
      return await this.load();
    } catch (error) {
      if (error instanceof Error && (error as { status?: number }).status === 404) {
        this.diagram = await this.api.createDiagram({
          id: this.boardId,
          title,
          elements: [],
          connections: [],
        });
        return this.diagram;
      }
      throw error;
    }
  }

  private board(): Diagram {
    if (!this.diagram) {
      throw new Error("board not loaded");
    }
    return this.diagram;
  }

  private async persist(next: Diagram): Promise<Diagram> {
    // The server is the source of truth: keep whatever it stored.
    this.diagram = await this.api.putDiagram(next);
    return this.diagram;
  }

  /** Palette drop: create an empty-or-labelled element at a board point. */
  async dropElement(
    kind: ElementKind,
    point: Point,
    label = "",
  ): Promise<DiagramElement> {
    const board = this.board();
    const element: DiagramElement = {
      id: freshId(),
      kind,
      label,
      position: { x: point.x, y: point.y },
    };
    await this.persist({
      ...board,
      elements: [...board.elements, element],
      modified: new Date().toISOString(),
    });
    return element;
  }

  async moveElement(elementId: string, point: Point): Promise<void> {
    const board = this.board();
    await this.persist({
      ...board,
      elements: board.elements.map((element) =>
        element.id === elementId
          ? { ...element, position: { x: point.x, y: point.y } }
          : element,
      ),
      modified: new Date().toISOString(),
    });
  }

  async relabelElement(elementId: string, label: string): Promise<void> {
    const board = this.board();
    await this.persist({
      ...board,
      elements: board.elements.map((element) =>
        element.id === elementId ? { ...element, label } : element,
      ),
      modified: new Date().toISOString(),
    });
  }

  async connect(
    sourceId: string,
    targetId: string,
    kind: ConnectionKind,
  ): Promise<void> {
    const board = this.board();
    await this.persist({
      ...board,
      connections: [
        ...board.connections,
        {
          id: freshId(),
          source: sourceId,
          target: targetId,
          target_type: "element",
          kind,
        },
      ],
      modified: new Date().toISOString(),
    });
  }

  /** Remove an element together with every connection that touches it. */
  async removeElement(elementId: string): Promise<void> {
    const board = this.board();
    const surviving = board.connections.filter(
      (connection) =>
        connection.source !== elementId &&
        !(connection.target_type === "element" && connection.target === elementId),
    );
    const survivingIds = new Set(surviving.map((connection) => connection.id));
    await this.persist({
      ...board,
      elements: board.elements.filter((element) => element.id !== elementId),
      connections: surviving.filter(
        (connection) =>
          connection.target_type === "element" ||
          survivingIds.has(connection.target),
      ),
      modified: new Date().toISOString(),
    });
  }

  async removeConnection(connectionId: string): Promise<void> {
    const board = this.board();
    await this.persist({
      ...board,
      connections: board.connections.filter(
        (connection) =>
          connection.id !== connectionId &&
          !(
            connection.target_type === "connection" &&
            connection.target === connectionId
          ),
      ),
      modified: new Date().toISOString(),
    });
  }

  check(): Promise<CheckResult> {
    return this.api.checkDiagram(this.boardId);
  }

  async autoLayout(): Promise<Diagram> {
    this.diagram = await this.api.layoutDiagram(this.boardId);
    return this.diagram;
  }
}

/** One wizard run: suggestions and entries for each backward-mapping step. */
export class WizardFlow {
  session: WizardSession | null = null;
  suggestions: string[] = [];

  constructor(readonly api: CpdApi) {}

  get step(): string {
    return this.session?.step ?? "not_started";
  }

  get done(): boolean {
    return this.session?.step === "done";
  }

  async start(distalHint?: string): Promise<WizardSession> {
    this.session = await this.api.startWizard(distalHint);
    this.suggestions = [];
    return this.session;
  }

  private id(): string {
    if (!this.session) {
      throw new Error("wizard not started");
    }
    return this.session.id;
  }

  async suggest(): Promise<SuggestionResult> {
    const result = await this.api.wizardSuggest(this.id());
    this.suggestions = result.candidates;
    return result;
  }

  async accept(label: string): Promise<WizardSession> {
    this.session = await this.api.wizardAccept(this.id(), label);
    this.suggestions = [];
    return this.session;
  }

  /** Drag-to-place: build the five-element pathway at the drop point. */
  async materialize(anchor: Point, boardId?: string): Promise<Diagram> {
    return this.api.wizardMaterialize(this.id(), anchor, boardId);
  }
}

export interface BrainstormPlacement {
  label: string;
  position: Point;
}

/** Five suggestion stickers fanned out next to the brainstormed element. */
export function placeStickers(
  candidates: string[],
  near: Point,
  gap = 96,
): BrainstormPlacement[] {
  return candidates.map((label, index) => ({
    label,
    position: { x: near.x + 200, y: near.y + (index - (candidates.length - 1) / 2) * gap },
  }));
}

export class BrainstormFlow {
  constructor(readonly api: CpdApi) {}

  async run(
    targetKind: ElementKind,
    before?: { kind: ElementKind; label: string },
    after?: { kind: ElementKind; label: string },
  ): Promise<SuggestionResult> {
    return this.api.brainstorm(targetKind, before, after);
  }
}
