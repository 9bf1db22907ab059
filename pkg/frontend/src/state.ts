/** View state for one board window. */

export type PanelTab = "component" | "wizard" | "brainstorm" | "checking" | "help";

export const PANEL_TABS: readonly PanelTab[] = [
  "component",
  "wizard",
  "brainstorm",
  "checking",
  "help",
];

export interface Viewport {
  x: number;
  y: number;
  scale: number;
}

export class BoardViewState {
  currentDiagramId: string | null = null;
  selection = new Set<string>();
  activeTab: PanelTab = "component";
  wizardSessionId: string | null = null;
  viewport: Viewport = { x: -200, y: -200, scale: 1 };

  private listeners = new Set<() => void>();

  onChange(listener: () => void): void {
    this.listeners.add(listener);
  }

  notify(): void {
    for (const listener of this.listeners) listener();
  }

  setTab(tab: PanelTab): void {
    this.activeTab = tab;
    this.notify();
  }

  /** Replace the selection; ids must exist on the board (caller checks). */
  select(ids: Iterable<string>): void {
    this.selection = new Set(ids);
    this.notify();
  }

  toggle(id: string): void {
    if (this.selection.has(id)) {
      this.selection.delete(id);
    } else {
      this.selection.add(id);
    }
    this.notify();
  }

  clearSelection(): void {
    if (this.selection.size > 0) {
      this.selection.clear();
      this.notify();
    }
  }
}
