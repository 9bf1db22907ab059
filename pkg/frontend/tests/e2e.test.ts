/** End-to-end acceptance against the real service (`cpd serve --mock`).
 *
 * Requires the Python package to be installed so the `cpd` executable is on
 * PATH; the suite spawns its own server on a scratch store.
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { ApiError, CpdApi } from "../src/api.js";
import { BoardController, BrainstormFlow, WizardFlow, placeStickers } from "../src/controller.js";
import { shapeFor, shapeMarkup } from "../src/shapes.js";
import { ELEMENT_KINDS } from "../src/types.js";

const PORT = 8977;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let storeDir: string;
const api = new CpdApi(BASE);

beforeAll(async () => {
  storeDir = mkdtempSync(join(tmpdir(), "cpd-e2e-"));
  server = spawn(
    "cpd",
    ["serve", "--store", storeDir, "--port", String(PORT), "--mock", "--seed", "42"],
    { stdio: "ignore" },
  );
  const deadline = Date.now() + 20_000;
  for (;;) {
    try {
      const response = await fetch(`${BASE}/health`);
      if (response.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      throw new Error("cpd serve did not come up; is the Python package installed?");
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
}, 30_000);

afterAll(() => {
  server?.kill();
  if (storeDir) rmSync(storeDir, { recursive: true, force: true });
});

describe("palette", () => {
  it("drops all 8 kinds and renders each with its correct shape", async () => {
    const controller = new BoardController(api, "e2e-palette");
    await controller.createIfMissing("Palette board");
    const markupTag: Record<string, string> = {
      rounded_rectangle: "<rect",
      rectangle: "<rect",
      diamond: "<polygon",
      octagon: "<polygon",
      isosceles_trapezoid: "<polygon",
      circle: "<ellipse",
    };
    for (const [index, kind] of ELEMENT_KINDS.entries()) {
      const element = await controller.dropElement(kind, { x: index * 200, y: 0 });
      expect(element.kind).toBe(kind);
      const markup = shapeMarkup(kind, index * 200, 0);
      expect(markup.startsWith(markupTag[shapeFor(kind)])).toBe(true);
    }
    // The server kept all eight, with their kinds intact.
    const stored = await api.getDiagram("e2e-palette");
    expect(stored.elements.map((element) => element.kind)).toEqual([...ELEMENT_KINDS]);
    // Octagon carries eight corners; the diamond four; rounded rect an rx.
    expect(shapeMarkup("barrier", 0, 0).match(/-?[\d.]+,-?[\d.]+/g)).toHaveLength(8);
    expect(shapeMarkup("mechanism", 0, 0).match(/-?[\d.]+,-?[\d.]+/g)).toHaveLength(4);
    expect(shapeMarkup("strategy", 0, 0)).toContain('rx="14"');
  });
});

describe("wizard", () => {
  it("walks backwards, places a five-element stem, and it checks clean", async () => {
    const controller = new BoardController(api, "e2e-wizard");
    await controller.createIfMissing("Wizard board");
    const flow = new WizardFlow(api);
    await flow.start("increase physical activity");
    const stepsSeen: string[] = [flow.step];
    while (!flow.done) {
      const result = await flow.suggest();
      expect(result.candidates.length).toBeGreaterThanOrEqual(1);
      expect(result.candidates.length).toBeLessThanOrEqual(5);
      await flow.accept(result.candidates[0]);
      stepsSeen.push(flow.step);
    }
    expect(stepsSeen).toEqual([
      "distal_outcome",
      "barrier",
      "proximal_outcome",
      "strategy",
      "mechanism",
      "done",
    ]);

    // Drag-to-place onto the board, then the Checking tab reports clean.
    const merged = await flow.materialize({ x: 0, y: 0 }, "e2e-wizard");
    expect(merged.id).toBe("e2e-wizard");
    expect(merged.elements).toHaveLength(5);
    await controller.load();
    const checked = await controller.check();
    expect(checked.diagnostics).toEqual([]);
    expect(checked.report).toBe("No syntax issues with your CPD pathway!");
  });

  it("reproduces identical suggestions for the identical session path", async () => {
    const first = new WizardFlow(api);
    const second = new WizardFlow(api);
    await first.start();
    await second.start();
    const a = await first.suggest();
    const b = await second.suggest();
    // Same seed, same step, same (empty) context: the mock is deterministic.
    expect(a.candidates).toEqual(b.candidates);
  });
});

describe("brainstorming", () => {
  it("returns exactly five chips and five sticker placements", async () => {
    const flow = new BrainstormFlow(api);
    const result = await flow.run(
      "mechanism",
      { kind: "strategy", label: "Run ad campaign" },
      { kind: "barrier", label: "Concerns about inconsistent schedule" },
    );
    expect(result.candidates).toHaveLength(5);
    const stickers = placeStickers(result.candidates, { x: 0, y: 0 });
    expect(stickers).toHaveLength(5);
  });

  it("rejects a contextless request with an explicit error", async () => {
    const error = await new BrainstormFlow(api).run("mechanism").catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.errorCode).toBe("no_context");
  });
});

describe("glossary", () => {
  it("serves definitions for tooltips and the help panel", async () => {
    const entries = await api.glossary();
    expect(entries).toHaveLength(8);
    const strategy = await api.glossaryFor("strategy");
    expect(strategy.definition).toContain(
      "Strategy is an element that the diagram is intended to unpack.",
    );
  });
});

describe("network down", () => {
  const dead = new CpdApi("http://127.0.0.1:9");

  async function expectNetworkError(work: Promise<unknown>): Promise<void> {
    const error = await work.catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).kind).toBe("network");
    expect((error as ApiError).message).toContain("unreachable");
  }

  it("every panel flow degrades with an explicit error, never stale data", async () => {
    const controller = new BoardController(dead, "any-board");
    await expectNetworkError(controller.load()); // board + component tab
    await expectNetworkError(new WizardFlow(dead).start()); // wizard tab
    await expectNetworkError(
      new BrainstormFlow(dead).run("mechanism", { kind: "barrier", label: "x" }),
    ); // brainstorming tab
    await expectNetworkError(dead.checkDiagram("any-board")); // checking tab
    await expectNetworkError(dead.glossaryFor("strategy")); // help tab
    expect(controller.diagram).toBeNull();
  });
});
