/** Boot the whiteboard: one board per window, five panel tabs, all state
 * fetched from the service (the UI computes nothing itself).
 */

import { ApiError, CpdApi } from "./api.js";
import { Board } from "./board.js";
import { BoardController, BrainstormFlow, WizardFlow } from "./controller.js";
import {
  PanelContext,
  StickerLayer,
  bindWizardDrop,
  renderBrainstormPanel,
  renderCheckingPanel,
  renderComponentPanel,
  renderHelpPanel,
  renderWizardPanel,
} from "./panels.js";
import { BoardViewState, PANEL_TABS, PanelTab } from "./state.js";
import { toast } from "./toast.js";
import type { ElementKind } from "./types.js";
import { kindLabel } from "./types.js";

const params = new URLSearchParams(window.location.search);
const apiBase =
  params.get("api") ??
  localStorage.getItem("cpd.api") ??
  "http://127.0.0.1:8844";
localStorage.setItem("cpd.api", apiBase);

const api = new CpdApi(apiBase);
const state = new BoardViewState();
const svg = document.getElementById("board") as unknown as SVGSVGElement;
const board = new Board(svg, state);
const wizardFlow = new WizardFlow(api);
const brainstormFlow = new BrainstormFlow(api);
const stickers = new StickerLayer();

let controller: BoardController;
let ctx: PanelContext;

async function refresh(): Promise<void> {
  const diagram = await controller.load();
  state.currentDiagramId = diagram.id;
  // Selection must reference existing items only.
  const known = new Set([
    ...diagram.elements.map((element) => element.id),
    ...diagram.connections.map((connection) => connection.id),
  ]);
  state.selection = new Set([...state.selection].filter((id) => known.has(id)));
  board.render(diagram);
  renderStickers();
  renderActivePanel();
}

function renderStickers(): void {
  const layer = document.getElementById("stickers");
  if (!layer) return;
  layer.innerHTML = "";
  for (const sticker of stickers.stickers) {
    const chip = document.createElement("div");
    chip.className = "sticker";
    chip.textContent = sticker.label;
    const screen = boardToScreen(sticker.position.x, sticker.position.y);
    chip.style.left = `${screen.x}px`;
    chip.style.top = `${screen.y}px`;
    layer.appendChild(chip);
  }
}

function boardToScreen(x: number, y: number): { x: number; y: number } {
  const ctm = svg.getScreenCTM();
  if (!ctm) return { x, y };
  const point = svg.createSVGPoint();
  point.x = x;
  point.y = y;
  const mapped = point.matrixTransform(ctm);
  const host = svg.getBoundingClientRect();
  return { x: mapped.x - host.left, y: mapped.y - host.top };
}

function renderActivePanel(): void {
  for (const tab of PANEL_TABS) {
    const button = document.querySelector(`[data-tab="${tab}"]`);
    button?.classList.toggle("active", state.activeTab === tab);
    const panel = document.getElementById(`panel-${tab}`);
    if (panel) panel.hidden = state.activeTab !== tab;
  }
  const host = document.getElementById(`panel-${state.activeTab}`);
  if (!host) return;
  switch (state.activeTab) {
    case "component":
      renderComponentPanel(host, ctx);
      break;
    case "wizard":
      renderWizardPanel(host, ctx, wizardFlow);
      break;
    case "brainstorm":
      renderBrainstormPanel(host, ctx, brainstormFlow, stickers, renderStickers);
      break;
    case "checking":
      renderCheckingPanel(host, ctx);
      break;
    case "help":
      renderHelpPanel(host, ctx);
      break;
  }
}

function wireBoard(): void {
  board.onElementClick = (id, additive) => {
    if (additive) {
      state.toggle(id);
    } else {
      state.select([id]);
    }
  };
  board.onConnectionClick = (id, additive) => {
    if (additive) {
      state.toggle(id);
    } else {
      state.select([id]);
    }
  };
  board.onBackgroundClick = () => state.clearSelection();
  board.onElementMoved = async (id, point) => {
    try {
      await controller.moveElement(id, point);
      await refresh();
    } catch (error) {
      toast(errorText(error), true);
      await refresh().catch(() => undefined);
    }
  };
  board.onDropKind = async (kind, point) => {
    try {
      await controller.dropElement(kind as ElementKind, point);
      await refresh();
      toast(`Added a ${kindLabel(kind as ElementKind)}.`);
    } catch (error) {
      toast(errorText(error), true);
    }
  };
  bindWizardDrop(ctx, wizardFlow);
}

function wireToolbar(): void {
  document.getElementById("btn-connect")?.addEventListener("click", async () => {
    const ids = [...state.selection];
    const diagram = controller.diagram;
    if (!diagram || ids.length !== 2) {
      toast("Select exactly two elements (shift-click) to connect.", true);
      return;
    }
    const kinds = new Map(diagram.elements.map((element) => [element.id, element.kind]));
    if (!kinds.has(ids[0]) || !kinds.has(ids[1])) {
      toast("Connections start and end at elements.", true);
      return;
    }
    const sourceKind = kinds.get(ids[0])!;
    const connectionKind =
      sourceKind === "moderator" || sourceKind === "precondition"
        ? "annotates"
        : "causal";
    try {
      await controller.connect(ids[0], ids[1], connectionKind);
      state.clearSelection();
      await refresh();
    } catch (error) {
      toast(errorText(error), true);
    }
  });

  document.getElementById("btn-delete")?.addEventListener("click", async () => {
    const diagram = controller.diagram;
    if (!diagram) return;
    const elements = new Set(diagram.elements.map((element) => element.id));
    try {
      for (const id of [...state.selection]) {
        if (elements.has(id)) {
          await controller.removeElement(id);
        } else {
          await controller.removeConnection(id);
        }
      }
      state.clearSelection();
      await refresh();
    } catch (error) {
      toast(errorText(error), true);
    }
  });

  document.getElementById("btn-layout")?.addEventListener("click", async () => {
    try {
      await controller.autoLayout();
      await refresh();
    } catch (error) {
      toast(errorText(error), true);
    }
  });

  document.getElementById("btn-rename")?.addEventListener("click", async () => {
    const diagram = controller.diagram;
    const selected = diagram?.elements.find((element) =>
      state.selection.has(element.id),
    );
    if (!selected) {
      toast("Select an element to edit its content.", true);
      return;
    }
    const label = window.prompt("Element content:", selected.label);
    if (label === null) return;
    try {
      await controller.relabelElement(selected.id, label);
      await refresh();
    } catch (error) {
      toast(errorText(error), true);
    }
  });
}

function errorText(error: unknown): string {
  if (error instanceof ApiError) return error.message;
  return String(error);
}

async function boot(): Promise<void> {
  const boardId =
    params.get("board") ?? localStorage.getItem("cpd.board") ?? `board-${Date.now()}`;
  localStorage.setItem("cpd.board", boardId);
  controller = new BoardController(api, boardId);
  ctx = { api, board, controller, state, glossary: [], refresh };

  for (const tab of PANEL_TABS) {
    document
      .querySelector(`[data-tab="${tab}"]`)
      ?.addEventListener("click", () => state.setTab(tab as PanelTab));
  }
  state.onChange(() => {
    if (controller.diagram) board.render(controller.diagram);
    renderActivePanel();
  });

  wireBoard();
  wireToolbar();

  try {
    ctx.glossary = await api.glossary();
    board.setGlossary(ctx.glossary);
  } catch (error) {
    toast(`Glossary unavailable: ${errorText(error)}`, true);
  }
  try {
    await controller.createIfMissing("Untitled CPD board");
    await refresh();
    document.getElementById("status")!.textContent =
      `board ${boardId} @ ${apiBase}`;
  } catch (error) {
    toast(errorText(error), true);
    document.getElementById("status")!.textContent =
      `cannot reach ${apiBase} — is the service running?`;
  }
}

boot();
