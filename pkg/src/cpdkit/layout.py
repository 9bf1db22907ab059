"""Deterministic left-to-right auto-layout for pathway diagrams.

Elements are placed on a grid anchored at a caller-supplied point: the
column is the longest-path depth along causal connections (so the stem
reads left to right), rows separate parallel pathways, and annotating
moderators/preconditions are offset above/below whatever they annotate.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    KIND_ORDER,
    Connection,
    ConnectionKind,
    Diagram,
    Element,
    ElementKind,
    Point,
    TargetType,
)


@dataclass(frozen=True)
class LayoutConfig:
    column_gap: float = 240.0
    row_gap: float = 140.0
    annotation_offset: float = 100.0

    def __post_init__(self) -> None:
        for name in ("column_gap", "row_gap", "annotation_offset"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


def column_depths(diagram: Diagram) -> dict[str, int]:
    """Longest-path depth per element over causal connections.

    Sources sit at depth 0; every causal connection increases depth, so x
    strictly increases along any pathway. Cyclic leftovers (only possible in
    invalid diagrams) get a best-effort depth in a deterministic order.
    """
    causal = [c for c in diagram.connections if c.kind is ConnectionKind.CAUSAL]
    successors: dict[str, list[str]] = {e.id: [] for e in diagram.elements}
    predecessors: dict[str, list[str]] = {e.id: [] for e in diagram.elements}
    indegree: dict[str, int] = {e.id: 0 for e in diagram.elements}
    for connection in causal:
        successors[connection.source].append(connection.target)
        predecessors[connection.target].append(connection.source)
        indegree[connection.target] += 1

    depth: dict[str, int] = {}
    ready = sorted(eid for eid, degree in indegree.items() if degree == 0)
    order: list[str] = []
    while ready:
        current = ready.pop(0)
        order.append(current)
        depth[current] = max(
            (depth[pred] + 1 for pred in predecessors[current] if pred in depth),
            default=0,
        )
        for succ in sorted(successors[current]):
            indegree[succ] -= 1
            if indegree[succ] == 0:
                ready.append(succ)
                ready.sort()
    for eid in sorted(indegree):
        if eid not in depth:
            depth[eid] = max(
                (depth.get(pred, 0) + 1 for pred in predecessors[eid]), default=0
            )
    return depth


def layout(
    diagram: Diagram,
    anchor: Point = Point(0.0, 0.0),
    config: LayoutConfig | None = None,
) -> Diagram:
    """Position every element; equal inputs always yield equal positions."""
    config = config or LayoutConfig()
    elements = diagram.element_map()
    connections = diagram.connection_map()

    annotation_links: dict[str, Connection] = {}
    for connection in sorted(diagram.connections, key=lambda c: c.id):
        if connection.kind is ConnectionKind.ANNOTATES:
            annotation_links.setdefault(connection.source, connection)

    depth = column_depths(diagram)
    grid_elements = [e for e in diagram.elements if e.id not in annotation_links]
    columns: dict[int, list[Element]] = {}
    for element in grid_elements:
        columns.setdefault(depth[element.id], []).append(element)

    positions: dict[str, Point] = {}
    for column_index, members in columns.items():
        members.sort(key=lambda e: (KIND_ORDER[e.kind], e.id))
        for row_index, element in enumerate(members):
            positions[element.id] = Point(
                x=anchor.x + column_index * config.column_gap,
                y=anchor.y + row_index * config.row_gap,
            )

    # Annotations hang off their targets, so resolve them after the grid;
    # chains of annotations resolve over repeated passes.
    pending = sorted(annotation_links)
    stack_count: dict[tuple[str, int], int] = {}
    while pending:
        progressed = False
        remaining: list[str] = []
        for element_id in pending:
            link = annotation_links[element_id]
            base = _annotation_base(link, positions, connections)
            if base is None:
                remaining.append(element_id)
                continue
            element = elements[element_id]
            side = 1 if element.kind is ElementKind.PRECONDITION else -1
            slot = (link.target, side)
            level = stack_count.get(slot, 0)
            stack_count[slot] = level + 1
            positions[element_id] = Point(
                x=base.x,
                y=base.y + side * (config.annotation_offset + level * config.row_gap),
            )
            progressed = True
        if not progressed:
            # Unresolvable annotation chain (e.g. a cycle): park the rest in
            # fresh rows under the first column.
            used_rows = len(columns.get(0, ()))
            for extra_index, element_id in enumerate(remaining):
                positions[element_id] = Point(
                    x=anchor.x,
                    y=anchor.y + (used_rows + extra_index) * config.row_gap,
                )
            break
        pending = remaining

    return diagram.with_positions(positions)


def _annotation_base(
    link: Connection,
    positions: dict[str, Point],
    connections: dict[str, Connection],
) -> Point | None:
    if link.target_type is TargetType.ELEMENT:
        return positions.get(link.target)
    target = connections[link.target]
    source_pos = positions.get(target.source)
    target_pos = positions.get(target.target)
    if source_pos is None or target_pos is None:
        return None
    return Point(
        x=(source_pos.x + target_pos.x) / 2.0, y=(source_pos.y + target_pos.y) / 2.0
    )
