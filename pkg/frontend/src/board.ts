/** SVG board: renders the diagram, selection, drag-to-move, drop targets.
 *
 * Rendering is a pure function of the diagram the server returned; nothing
 * is drawn speculatively, so a failed save never leaves phantom items.
 */

import type { Diagram, DiagramConnection, GlossaryEntry, Point } from "./types.js";
import { elementMarkup } from "./shapes.js";
import type { BoardViewState } from "./state.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export class Board {
  private definitions = new Map<string, string>();
  onElementClick: ((id: string, additive: boolean) => void) | null = null;
  onConnectionClick: ((id: string, additive: boolean) => void) | null = null;
  onElementMoved: ((id: string, point: Point) => void) | null = null;
  onBackgroundClick: (() => void) | null = null;
  onDropKind: ((kind: string, point: Point) => void) | null = null;
  onDropWizard: ((point: Point) => void) | null = null;

  private dragging: { id: string; dx: number; dy: number } | null = null;
  private dragMoved = false;
  private lastDiagram: Diagram | null = null;

  constructor(
    private readonly svg: SVGSVGElement,
    private readonly state: BoardViewState,
  ) {
    svg.addEventListener("pointerdown", (event) => this.pointerDown(event));
    svg.addEventListener("pointermove", (event) => this.pointerMove(event));
    svg.addEventListener("pointerup", (event) => this.pointerUp(event));
    svg.addEventListener("dragover", (event) => event.preventDefault());
    svg.addEventListener("drop", (event) => this.drop(event));
    svg.addEventListener("wheel", (event) => this.zoom(event), { passive: false });
  }

  setGlossary(entries: GlossaryEntry[]): void {
    this.definitions = new Map(entries.map((entry) => [entry.kind, entry.definition]));
  }

  /** Client point → board coordinates under the current viewBox. */
  toBoardPoint(clientX: number, clientY: number): Point {
    const point = this.svg.createSVGPoint();
    point.x = clientX;
    point.y = clientY;
    const ctm = this.svg.getScreenCTM();
    if (!ctm) return { x: clientX, y: clientY };
    const mapped = point.matrixTransform(ctm.inverse());
    return { x: mapped.x, y: mapped.y };
  }

  render(diagram: Diagram): void {
    this.lastDiagram = diagram;
    const { x, y, scale } = this.state.viewport;
    const width = this.svg.clientWidth || 1200;
    const height = this.svg.clientHeight || 800;
    this.svg.setAttribute(
      "viewBox",
      `${x} ${y} ${width / scale} ${height / scale}`,
    );
    this.svg.innerHTML = marker();

    const centers = new Map<string, Point>();
    for (const element of diagram.elements) {
      centers.set(element.id, element.position ?? { x: 0, y: 0 });
    }
    const connections = new Map(diagram.connections.map((c) => [c.id, c]));

    const edgeLayer = document.createElementNS(SVG_NS, "g");
    for (const connection of diagram.connections) {
      const path = this.edgePath(connection, centers, connections);
      if (!path) continue;
      const selected = this.state.selection.has(connection.id);
      const node = document.createElementNS(SVG_NS, "path");
      node.setAttribute("d", path);
      node.setAttribute("fill", "none");
      node.setAttribute("stroke", selected ? "#d9480f" : "#333");
      node.setAttribute("stroke-width", selected ? "3" : "1.5");
      if (connection.kind === "annotates") {
        node.setAttribute("stroke-dasharray", "6,4");
      }
      node.setAttribute("marker-end", "url(#board-arrow)");
      node.setAttribute("data-connection", connection.id);
      node.classList.add("edge");
      node.addEventListener("click", (event) => {
        event.stopPropagation();
        this.onConnectionClick?.(connection.id, event.shiftKey);
      });
      edgeLayer.appendChild(node);
    }
    this.svg.appendChild(edgeLayer);

    const nodeLayer = document.createElementNS(SVG_NS, "g");
    for (const element of diagram.elements) {
      const center = centers.get(element.id)!;
      const group = document.createElementNS(SVG_NS, "g");
      group.setAttribute("data-element", element.id);
      group.setAttribute("data-kind", element.kind);
      group.classList.add("element");
      if (this.state.selection.has(element.id)) {
        group.classList.add("selected");
      }
      group.innerHTML = elementMarkup(element.kind, element.label, center.x, center.y);
      const definition = this.definitions.get(element.kind);
      if (definition) {
        const tooltip = document.createElementNS(SVG_NS, "title");
        tooltip.textContent = definition;
        group.appendChild(tooltip);
      }
      nodeLayer.appendChild(group);
    }
    this.svg.appendChild(nodeLayer);
  }

  private edgePath(
    connection: DiagramConnection,
    centers: Map<string, Point>,
    connections: Map<string, DiagramConnection>,
  ): string | null {
    const start = centers.get(connection.source);
    if (!start) return null;
    let end: Point | undefined;
    if (connection.target_type === "element") {
      end = centers.get(connection.target);
    } else {
      const target = connections.get(connection.target);
      if (target) {
        const a = centers.get(target.source);
        const b = centers.get(target.target);
        if (a && b) end = { x: (a.x + b.x) / 2, y: (a.y + b.y) / 2 };
      }
    }
    if (!end) return null;
    // Orthogonal elbow: out horizontally, across, then into the target.
    const midX = (start.x + end.x) / 2;
    return `M ${start.x} ${start.y} L ${midX} ${start.y} L ${midX} ${end.y} L ${end.x} ${end.y}`;
  }

  private elementIdAt(event: PointerEvent | MouseEvent): string | null {
    let node = event.target as Element | null;
    while (node && node !== this.svg) {
      const id = node.getAttribute?.("data-element");
      if (id) return id;
      node = node.parentElement;
    }
    return null;
  }

  private pointerDown(event: PointerEvent): void {
    const id = this.elementIdAt(event);
    if (!id || !this.lastDiagram) return;
    const element = this.lastDiagram.elements.find((e) => e.id === id);
    if (!element?.position) return;
    const point = this.toBoardPoint(event.clientX, event.clientY);
    this.dragging = {
      id,
      dx: element.position.x - point.x,
      dy: element.position.y - point.y,
    };
    this.dragMoved = false;
    this.svg.setPointerCapture(event.pointerId);
  }

  private pointerMove(event: PointerEvent): void {
    if (!this.dragging || !this.lastDiagram) return;
    this.dragMoved = true;
    const point = this.toBoardPoint(event.clientX, event.clientY);
    const element = this.lastDiagram.elements.find((e) => e.id === this.dragging!.id);
    if (element) {
      element.position = {
        x: point.x + this.dragging.dx,
        y: point.y + this.dragging.dy,
      };
      this.render(this.lastDiagram);
    }
  }

  private pointerUp(event: PointerEvent): void {
    if (this.dragging) {
      const grabbed = this.dragging;
      this.dragging = null;
      if (this.dragMoved) {
        const point = this.toBoardPoint(event.clientX, event.clientY);
        this.onElementMoved?.(grabbed.id, {
          x: point.x + grabbed.dx,
          y: point.y + grabbed.dy,
        });
      } else {
        this.onElementClick?.(grabbed.id, event.shiftKey);
      }
      return;
    }
    const id = this.elementIdAt(event);
    if (id) {
      this.onElementClick?.(id, event.shiftKey);
    } else {
      this.onBackgroundClick?.();
    }
  }

  private drop(event: DragEvent): void {
    event.preventDefault();
    const point = this.toBoardPoint(event.clientX, event.clientY);
    const kind = event.dataTransfer?.getData("application/x-cpd-kind");
    if (kind) {
      this.onDropKind?.(kind, point);
      return;
    }
    if (event.dataTransfer?.getData("application/x-cpd-wizard")) {
      this.onDropWizard?.(point);
    }
  }

  private zoom(event: WheelEvent): void {
    event.preventDefault();
    const factor = event.deltaY < 0 ? 1.1 : 1 / 1.1;
    const next = Math.min(3, Math.max(0.25, this.state.viewport.scale * factor));
    this.state.viewport.scale = next;
    if (this.lastDiagram) this.render(this.lastDiagram);
  }
}

function marker(): string {
  return (
    '<defs><marker id="board-arrow" viewBox="0 0 10 10" refX="9" refY="5" ' +
    'markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
    '<path d="M 0 0 L 10 5 L 0 10 z" fill="#333"/></marker></defs>'
  );
}
