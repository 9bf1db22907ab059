/** Wire types for the CPD service API. */

export type ElementKind =
  | "strategy"
  | "mechanism"
  | "barrier"
  | "moderator"
  | "precondition"
  | "proximal_outcome"
  | "intermediate_outcome"
  | "distal_outcome";

export const ELEMENT_KINDS: readonly ElementKind[] = [
  "strategy",
  "mechanism",
  "barrier",
  "moderator",
  "precondition",
  "proximal_outcome",
  "intermediate_outcome",
  "distal_outcome",
];

export type ConnectionKind = "causal" | "annotates";
export type TargetType = "element" | "connection";

export interface Point {
  x: number;
  y: number;
}

export interface DiagramElement {
  id: string;
  kind: ElementKind;
  label: string;
  note?: string;
  position?: Point;
}

export interface DiagramConnection {
  id: string;
  source: string;
  target: string;
  target_type: TargetType;
  kind: ConnectionKind;
}

export interface Diagram {
  id: string;
  title: string;
  created: string;
  modified: string;
  elements: DiagramElement[];
  connections: DiagramConnection[];
  [extra: string]: unknown;
}

export interface DiagramSummary {
  id: string;
  title: string;
  created: string;
  modified: string;
  element_count: number;
}

export interface Diagnostic {
  code: string;
  severity: "error" | "warning";
  subjects: string[];
  message: string;
}

export interface CheckResult {
  diagnostics: Diagnostic[];
  report: string;
}

export type WizardStep =
  | "distal_outcome"
  | "barrier"
  | "proximal_outcome"
  | "strategy"
  | "mechanism"
  | "done";

export interface WizardSession {
  id: string;
  step: WizardStep;
  entries: Partial<Record<ElementKind, string>>;
  pending_suggestions: string[];
  target_board: string | null;
  distal_hint: string | null;
  created: string;
  modified: string;
}

export interface SuggestionResult {
  candidates: string[];
  raw: string;
  provenance: { backend: string; request_id: string };
}

export interface GlossaryEntry {
  kind: ElementKind;
  definition: string;
  guidance: string | null;
}

export function kindLabel(kind: ElementKind): string {
  return kind.replace(/_/g, " ");
}

export function freshId(): string {
  if (typeof crypto !== "undefined" && "randomUUID" in crypto) {
    return crypto.randomUUID();
  }
  return `id-${Date.now()}-${Math.random().toString(16).slice(2)}`;
}
