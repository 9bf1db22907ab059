"""Structural checking of causal pathway diagrams.

Diagnoses four error categories: required elements that are missing,
elements not connected to the pathway, connections in the wrong order, and
pathways that do not start with an implementation strategy or do not end
with a distal outcome. Empty labels are reported as warnings on top.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .model import (
    ANNOTATION_KINDS,
    KIND_ORDER,
    REQUIRED_KINDS,
    Connection,
    ConnectionKind,
    Diagram,
    Element,
    ElementKind,
    TargetType,
)

NO_ISSUES_MESSAGE = "No syntax issues with your CPD pathway!"
MISSING_INTRO_MESSAGE = "You might consider adding the following components."

#: Which stem kind may causally follow which. A barrier may sit between the
#: mechanism and the proximal outcome, or be answered by a further
#: mechanism; intermediate outcomes may chain. Distal outcomes are terminal.
STEM_SUCCESSORS: dict[ElementKind, frozenset[ElementKind]] = {
    ElementKind.STRATEGY: frozenset({ElementKind.MECHANISM}),
    ElementKind.MECHANISM: frozenset(
        {ElementKind.BARRIER, ElementKind.PROXIMAL_OUTCOME}
    ),
    ElementKind.BARRIER: frozenset(
        {ElementKind.PROXIMAL_OUTCOME, ElementKind.MECHANISM}
    ),
    ElementKind.PROXIMAL_OUTCOME: frozenset(
        {ElementKind.INTERMEDIATE_OUTCOME, ElementKind.DISTAL_OUTCOME}
    ),
    ElementKind.INTERMEDIATE_OUTCOME: frozenset(
        {ElementKind.INTERMEDIATE_OUTCOME, ElementKind.DISTAL_OUTCOME}
    ),
    ElementKind.DISTAL_OUTCOME: frozenset(),
}


def allowed_successor(source: ElementKind, target: ElementKind) -> bool:
    """True when a causal connection source→target respects the stem grammar."""
    return target in STEM_SUCCESSORS.get(source, frozenset())


class DiagnosticCode(str, Enum):
    MISSING_REQUIRED_ELEMENT = "missing_required_element"
    DISCONNECTED_ELEMENT = "disconnected_element"
    INVALID_ORDER = "invalid_order"
    INVALID_ENDPOINTS = "invalid_endpoints"
    EMPTY_LABEL = "empty_label"


_CODE_ORDER = {code: index for index, code in enumerate(DiagnosticCode)}


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """One finding. ``subjects`` name the offending elements/connections;
    they are empty for missing-element findings."""

    code: DiagnosticCode
    severity: Severity
    subjects: tuple[str, ...]
    message: str
    #: Set for MISSING_REQUIRED_ELEMENT only: the kind that is absent.
    kind: ElementKind | None = None


def _display(element: Element) -> str:
    return element.label if element.label.strip() else element.id


def _target_display(
    connection: Connection, elements: dict[str, Element]
) -> str:
    if connection.target_type is TargetType.ELEMENT:
        return f'"{_display(elements[connection.target])}"'
    return f"connection {connection.target}"


def _maximal_causal_paths(
    element_ids: list[str], causal: list[Connection]
) -> list[tuple[str, ...]]:
    """All maximal simple paths over the causal connections.

    A path is maximal when it cannot be extended at either end without
    repeating an element, so cycles still terminate. Paths contain at least
    one connection; an element without causal links is not a pathway.
    """
    successors: dict[str, list[str]] = {eid: [] for eid in element_ids}
    predecessors: dict[str, list[str]] = {eid: [] for eid in element_ids}
    for connection in causal:
        successors[connection.source].append(connection.target)
        predecessors[connection.target].append(connection.source)
    for adjacency in (successors, predecessors):
        for neighbors in adjacency.values():
            neighbors.sort()

    paths: list[tuple[str, ...]] = []

    def extend(path: list[str], visited: set[str]) -> None:
        tail = path[-1]
        nexts = [node for node in successors[tail] if node not in visited]
        if nexts:
            for node in nexts:
                visited.add(node)
                path.append(node)
                extend(path, visited)
                path.pop()
                visited.remove(node)
            return
        if len(path) < 2:
            return
        # Forward-maximal; keep it only if the head cannot be extended either.
        if all(pred in visited for pred in predecessors[path[0]]):
            paths.append(tuple(path))

    for start in sorted(element_ids):
        if successors[start]:
            extend([start], {start})
    return paths


def check(diagram: Diagram) -> list[Diagnostic]:
    """Diagnose a diagram. Pure and deterministic: equal diagrams produce the
    same findings in the same order (by code, then by subject ids)."""
    findings: list[Diagnostic] = []
    elements = diagram.element_map()
    causal = [c for c in diagram.connections if c.kind is ConnectionKind.CAUSAL]

    present = {element.kind for element in diagram.elements}
    for kind in REQUIRED_KINDS:
        if kind not in present:
            findings.append(
                Diagnostic(
                    code=DiagnosticCode.MISSING_REQUIRED_ELEMENT,
                    severity=Severity.ERROR,
                    subjects=(),
                    message=f"A required element is missing: {kind.display}.",
                    kind=kind,
                )
            )

    incident: set[str] = set()
    for connection in diagram.connections:
        incident.add(connection.source)
        if connection.target_type is TargetType.ELEMENT:
            incident.add(connection.target)
    for element in diagram.elements:
        if element.id not in incident:
            findings.append(
                Diagnostic(
                    code=DiagnosticCode.DISCONNECTED_ELEMENT,
                    severity=Severity.ERROR,
                    subjects=(element.id,),
                    message=(
                        f'Element "{_display(element)}" is not connected to the '
                        "CPD pathway."
                    ),
                )
            )

    for connection in diagram.connections:
        source = elements[connection.source]
        if connection.kind is ConnectionKind.CAUSAL:
            target = elements[connection.target]
            if not allowed_successor(source.kind, target.kind):
                findings.append(
                    Diagnostic(
                        code=DiagnosticCode.INVALID_ORDER,
                        severity=Severity.ERROR,
                        subjects=(connection.id,),
                        message=(
                            f'"{_display(source)}" and "{_display(target)}" are '
                            f"connected in the wrong order: a {source.kind.display} "
                            f"cannot lead to a {target.kind.display}."
                        ),
                    )
                )
        elif source.kind not in ANNOTATION_KINDS:
            findings.append(
                Diagnostic(
                    code=DiagnosticCode.INVALID_ORDER,
                    severity=Severity.ERROR,
                    subjects=(connection.id,),
                    message=(
                        f'"{_display(source)}" and '
                        f"{_target_display(connection, elements)} are connected in "
                        f"the wrong order: a {source.kind.display} cannot annotate "
                        "the causal process."
                    ),
                )
            )

    endpoint_findings: set[Diagnostic] = set()
    for path in _maximal_causal_paths(list(elements), causal):
        start = elements[path[0]]
        end = elements[path[-1]]
        bad_start = start.kind is not ElementKind.STRATEGY
        bad_end = end.kind is not ElementKind.DISTAL_OUTCOME
        if not (bad_start or bad_end):
            continue
        subjects = tuple(
            eid for eid, bad in ((path[0], bad_start), (path[-1], bad_end)) if bad
        )
        if bad_start and bad_end:
            detail = (
                "does not start with an implementation strategy and does not end "
                "with a distal outcome"
            )
        elif bad_start:
            detail = "does not start with an implementation strategy"
        else:
            detail = "does not end with a distal outcome"
        endpoint_findings.add(
            Diagnostic(
                code=DiagnosticCode.INVALID_ENDPOINTS,
                severity=Severity.ERROR,
                subjects=subjects,
                message=(
                    f'The pathway from "{_display(start)}" to "{_display(end)}" '
                    f"{detail}."
                ),
            )
        )
    findings.extend(sorted(endpoint_findings, key=lambda d: (d.subjects, d.message)))

    for element in diagram.elements:
        if not element.label.strip():
            findings.append(
                Diagnostic(
                    code=DiagnosticCode.EMPTY_LABEL,
                    severity=Severity.WARNING,
                    subjects=(element.id,),
                    message=(
                        f"The {element.kind.display} element {element.id} has an "
                        "empty label."
                    ),
                )
            )

    # Stable sort: equal (code, subjects) keep their generation order, so
    # missing-element findings stay in stem order.
    findings.sort(key=lambda d: (_CODE_ORDER[d.code], d.subjects))
    return findings


def report(diagnostics: list[Diagnostic]) -> str:
    """Render findings as the user-facing checking report.

    No error-severity findings at all yields the positive confirmation;
    warnings never suppress it.
    """
    errors = [d for d in diagnostics if d.severity is Severity.ERROR]
    lines: list[str] = []
    if not errors:
        lines.append(NO_ISSUES_MESSAGE)
    missing = [
        d for d in diagnostics if d.code is DiagnosticCode.MISSING_REQUIRED_ELEMENT
    ]
    if missing:
        lines.append(MISSING_INTRO_MESSAGE)
        for diagnostic in missing:
            kind = diagnostic.kind
            lines.append(f"- {kind.display}" if kind else f"- {diagnostic.message}")
    for diagnostic in diagnostics:
        if diagnostic.code is DiagnosticCode.MISSING_REQUIRED_ELEMENT:
            continue
        if diagnostic.severity is Severity.ERROR:
            lines.append(diagnostic.message)
        else:
            lines.append(f"Warning: {diagnostic.message}")
    return "\n".join(lines)


def diagnostic_to_obj(diagnostic: Diagnostic) -> dict:
    """Wire form of one diagnostic (used by the HTTP API and the CLI)."""
    return {
        "code": diagnostic.code.value,
        "severity": diagnostic.severity.value,
        "subjects": list(diagnostic.subjects),
        "message": diagnostic.message,
    }
