/** The five side-panel tabs: Component, Wizard, Brainstorming, Checking,
 * Help. Each is a thin client over the service API; panels surface every
 * failure as a toast or inline error and never show stale results.
 */

import { ApiError, CpdApi } from "./api.js";
import type { Board } from "./board.js";
import {
  BoardController,
  BrainstormFlow,
  WizardFlow,
  placeStickers,
} from "./controller.js";
import { shapeMarkup } from "./shapes.js";
import type { BoardViewState } from "./state.js";
import { toast } from "./toast.js";
import type { ElementKind, GlossaryEntry, Point } from "./types.js";
import { ELEMENT_KINDS, kindLabel } from "./types.js";

function el(tag: string, className = "", text = ""): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function errorText(error: unknown): string {
  if (error instanceof ApiError) return error.message;
  return String(error);
}

export interface PanelContext {
  api: CpdApi;
  board: Board;
  controller: BoardController;
  state: BoardViewState;
  glossary: GlossaryEntry[];
  refresh: () => Promise<void>;
}

// -- Component -------------------------------------------------------------

export function renderComponentPanel(host: HTMLElement, ctx: PanelContext): void {
  host.innerHTML = "";
  host.appendChild(
    el("p", "hint", "Drag a component onto the board. Hover for its definition."),
  );
  const byKind = new Map(ctx.glossary.map((entry) => [entry.kind, entry]));
  for (const kind of ELEMENT_KINDS) {
    const item = el("div", "palette-item");
    item.setAttribute("draggable", "true");
    item.title = byKind.get(kind)?.definition ?? "";
    const preview = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    preview.setAttribute("viewBox", `-90 -50 180 100`);
    preview.classList.add("palette-preview");
    preview.innerHTML = shapeMarkup(kind, 0, 0);
    item.appendChild(preview);
    item.appendChild(el("span", "", kindLabel(kind)));
    item.addEventListener("dragstart", (event) => {
      event.dataTransfer?.setData("application/x-cpd-kind", kind);
    });
    host.appendChild(item);
  }
}

// -- Wizard ------------------------------------------------------------------

export function renderWizardPanel(
  host: HTMLElement,
  ctx: PanelContext,
  flow: WizardFlow,
): void {
  const byKind = new Map(ctx.glossary.map((entry) => [entry.kind, entry]));
  const rerender = () => renderWizardPanel(host, ctx, flow);
  host.innerHTML = "";

  if (!flow.session) {
    host.appendChild(
      el("p", "hint", "Build a pathway step by step, starting from the distal outcome."),
    );
    const hint = document.createElement("input");
    hint.placeholder = "Desired distal outcome (optional)";
    host.appendChild(hint);
    const start = el("button", "primary", "Start wizard") as HTMLButtonElement;
    start.addEventListener("click", async () => {
      try {
        await flow.start(hint.value.trim() || undefined);
        ctx.state.wizardSessionId = flow.session!.id;
        rerender();
      } catch (error) {
        toast(errorText(error), true);
      }
    });
    host.appendChild(start);
    return;
  }

  const session = flow.session;
  if (session.step === "done") {
    host.appendChild(el("p", "", "All five components are filled in."));
    const list = el("ul", "entries");
    for (const [kind, label] of Object.entries(session.entries)) {
      list.appendChild(el("li", "", `${kindLabel(kind as ElementKind)}: ${label}`));
    }
    host.appendChild(list);
    const chip = el("div", "drag-chip", "Drag me onto the board to place the pathway");
    chip.setAttribute("draggable", "true");
    chip.addEventListener("dragstart", (event) => {
      event.dataTransfer?.setData("application/x-cpd-wizard", session.id);
    });
    host.appendChild(chip);
    const restart = el("button", "", "Start another pathway") as HTMLButtonElement;
    restart.addEventListener("click", async () => {
      flow.session = null;
      rerender();
    });
    host.appendChild(restart);
    return;
  }

  const kind = session.step as ElementKind;
  const entry = byKind.get(kind);
  host.appendChild(el("h3", "", kindLabel(kind)));
  if (entry?.guidance) host.appendChild(el("p", "guidance", entry.guidance));
  if (entry) host.appendChild(el("p", "hint", entry.definition));

  const input = document.createElement("input");
  input.placeholder = `Content for the ${kindLabel(kind)}`;
  if (kind === "distal_outcome" && session.distal_hint) {
    input.value = session.distal_hint;
  }
  host.appendChild(input);

  const chips = el("div", "chips");
  chips.id = "wizard-chips";
  for (const candidate of flow.suggestions) {
    const chip = el("button", "chip", candidate) as HTMLButtonElement;
    chip.addEventListener("click", () => {
      input.value = candidate;
    });
    chips.appendChild(chip);
  }
  host.appendChild(chips);

  const controls = el("div", "row");
  const suggestButton = el("button", "", "Suggest 5") as HTMLButtonElement;
  suggestButton.addEventListener("click", async () => {
    suggestButton.disabled = true;
    try {
      await flow.suggest();
      rerender();
    } catch (error) {
      toast(errorText(error), true);
      suggestButton.disabled = false;
    }
  });
  controls.appendChild(suggestButton);

  const accept = el("button", "primary", "Accept") as HTMLButtonElement;
  accept.addEventListener("click", async () => {
    try {
      await flow.accept(input.value);
      rerender();
    } catch (error) {
      toast(errorText(error), true);
    }
  });
  controls.appendChild(accept);
  host.appendChild(controls);
  host.appendChild(
    el("p", "hint", `Accepted so far: ${Object.keys(session.entries).length} of 5.`),
  );
}

/** Wire the board's wizard-drop target: place the pathway where it lands. */
export function bindWizardDrop(ctx: PanelContext, flow: WizardFlow): void {
  ctx.board.onDropWizard = async (point: Point) => {
    if (!flow.done) {
      toast("Finish all five wizard steps first.", true);
      return;
    }
    try {
      await flow.materialize(point, ctx.controller.boardId);
      await ctx.refresh();
      toast("Pathway placed on the board.");
    } catch (error) {
      toast(errorText(error), true);
    }
  };
}

// -- Brainstorming -----------------------------------------------------------

interface Sticker {
  label: string;
  position: Point;
}

export class StickerLayer {
  stickers: Sticker[] = [];
  targetId: string | null = null;
}

export function renderBrainstormPanel(
  host: HTMLElement,
  ctx: PanelContext,
  flow: BrainstormFlow,
  stickers: StickerLayer,
  renderStickers: () => void,
): void {
  host.innerHTML = "";
  host.appendChild(
    el(
      "p",
      "hint",
      "Select an element on the board, confirm its neighbors, and get five suggestions for it.",
    ),
  );
  const diagram = ctx.controller.diagram;
  const selected = diagram?.elements.find((element) =>
    ctx.state.selection.has(element.id),
  );
  if (!selected) {
    host.appendChild(el("p", "", "Nothing selected yet."));
    return;
  }
  host.appendChild(
    el("h3", "", `${kindLabel(selected.kind)}: ${selected.label || "(empty)"}`),
  );

  // Neighbors along causal connections, if any, prefill the context.
  const incoming = diagram!.connections.find(
    (connection) =>
      connection.kind === "causal" && connection.target === selected.id,
  );
  const outgoing = diagram!.connections.find(
    (connection) =>
      connection.kind === "causal" && connection.source === selected.id,
  );
  const elementById = new Map(diagram!.elements.map((element) => [element.id, element]));
  const before = incoming ? elementById.get(incoming.source) : undefined;
  const after = outgoing ? elementById.get(outgoing.target) : undefined;

  host.appendChild(
    el(
      "p",
      "",
      `Preceding: ${before ? `${kindLabel(before.kind)} "${before.label}"` : "(none)"}`,
    ),
  );
  host.appendChild(
    el(
      "p",
      "",
      `Following: ${after ? `${kindLabel(after.kind)} "${after.label}"` : "(none)"}`,
    ),
  );

  const run = el("button", "primary", "Brainstorm 5 candidates") as HTMLButtonElement;
  run.addEventListener("click", async () => {
    run.disabled = true;
    try {
      const result = await flow.run(
        selected.kind,
        before && before.label ? { kind: before.kind, label: before.label } : undefined,
        after && after.label ? { kind: after.kind, label: after.label } : undefined,
      );
      const near = selected.position ?? { x: 0, y: 0 };
      stickers.targetId = selected.id;
      stickers.stickers = placeStickers(result.candidates, near);
      renderStickers();
      renderChips(result.candidates);
    } catch (error) {
      toast(errorText(error), true);
    } finally {
      run.disabled = false;
    }
  });
  host.appendChild(run);

  const chips = el("div", "chips");
  chips.id = "brainstorm-chips";
  host.appendChild(chips);

  const renderChips = (candidates: string[]) => {
    chips.innerHTML = "";
    for (const candidate of candidates) {
      const chip = el("button", "chip", candidate) as HTMLButtonElement;
      chip.title = "Use as the content of the selected element";
      chip.addEventListener("click", async () => {
        try {
          await ctx.controller.relabelElement(selected.id, candidate);
          stickers.stickers = [];
          stickers.targetId = null;
          renderStickers();
          await ctx.refresh();
        } catch (error) {
          toast(errorText(error), true);
        }
      });
      chips.appendChild(chip);
    }
  };
}

// -- Checking ------------------------------------------------------------------

export function renderCheckingPanel(host: HTMLElement, ctx: PanelContext): void {
  host.innerHTML = "";
  host.appendChild(
    el(
      "p",
      "hint",
      "Checks the selected part of the board, or everything when nothing is selected.",
    ),
  );
  const button = el("button", "primary", "Check") as HTMLButtonElement;
  const output = el("div", "check-output");
  button.addEventListener("click", async () => {
    button.disabled = true;
    output.innerHTML = "";
    try {
      const result = await runCheck(ctx);
      const reportNode = el("pre", "report", result.report);
      output.appendChild(reportNode);
      for (const diagnostic of result.diagnostics) {
        const row = el(
          "button",
          `diagnostic ${diagnostic.severity}`,
          `${diagnostic.severity}: ${diagnostic.message}`,
        ) as HTMLButtonElement;
        row.addEventListener("click", () => {
          ctx.state.select(diagnostic.subjects);
        });
        output.appendChild(row);
      }
    } catch (error) {
      output.appendChild(el("p", "error", errorText(error)));
    } finally {
      button.disabled = false;
    }
  });
  host.appendChild(button);
  host.appendChild(output);
}

async function runCheck(ctx: PanelContext) {
  const diagram = ctx.controller.diagram;
  if (!diagram || ctx.state.selection.size === 0) {
    return ctx.controller.check();
  }
  // Check just the selected sub-diagram: keep selected elements plus the
  // connections whose endpoints are all selected, via a throwaway document.
  const keptElements = diagram.elements.filter((element) =>
    ctx.state.selection.has(element.id),
  );
  const keptIds = new Set(keptElements.map((element) => element.id));
  const direct = diagram.connections.filter(
    (connection) =>
      connection.target_type === "element" &&
      keptIds.has(connection.source) &&
      keptIds.has(connection.target),
  );
  const directIds = new Set(direct.map((connection) => connection.id));
  const onConnections = diagram.connections.filter(
    (connection) =>
      connection.target_type === "connection" &&
      keptIds.has(connection.source) &&
      directIds.has(connection.target),
  );
  const scratch = await ctx.api.createDiagram({
    title: `${diagram.title} (selection)`,
    elements: keptElements,
    connections: [...direct, ...onConnections],
  });
  try {
    return await ctx.api.checkDiagram(scratch.id);
  } finally {
    ctx.api.deleteDiagram(scratch.id).catch(() => undefined);
  }
}

// -- Help -----------------------------------------------------------------------

export function renderHelpPanel(host: HTMLElement, ctx: PanelContext): void {
  host.innerHTML = "";
  host.appendChild(
    el("p", "hint", "Select an element on the board, then ask for its definition."),
  );
  const diagram = ctx.controller.diagram;
  const selected = diagram?.elements.find((element) =>
    ctx.state.selection.has(element.id),
  );
  if (!selected) {
    host.appendChild(el("p", "", "Nothing selected yet."));
    return;
  }
  host.appendChild(el("h3", "", kindLabel(selected.kind)));
  const learn = el("button", "primary", "Learn more") as HTMLButtonElement;
  const output = el("div", "definition");
  learn.addEventListener("click", async () => {
    output.textContent = "";
    try {
      const entry = await ctx.api.glossaryFor(selected.kind);
      output.textContent = entry.definition;
    } catch (error) {
      output.textContent = errorText(error);
      output.className = "definition error";
    }
  });
  host.appendChild(learn);
  host.appendChild(output);
}

