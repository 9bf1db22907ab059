"""DOT and SVG export.

Both outputs are plain deterministic text: node shapes follow the fixed
kind/shape mapping, causal links are solid arrows, annotations are dashed.
"""

from __future__ import annotations

import textwrap

from .layout import LayoutConfig, layout
from .model import (
    Connection,
    ConnectionKind,
    Diagram,
    Element,
    Point,
    Shape,
    TargetType,
    shape_of,
)

# (dot shape, dot style) per visual shape.
_DOT_SHAPES: dict[Shape, tuple[str, str | None]] = {
    Shape.ROUNDED_RECTANGLE: ("box", "rounded"),
    Shape.DIAMOND: ("diamond", None),
    Shape.OCTAGON: ("octagon", None),
    Shape.RECTANGLE: ("box", None),
    Shape.ISOSCELES_TRAPEZOID: ("trapezium", None),
    Shape.CIRCLE: ("circle", None),
}

ELEMENT_WIDTH = 160.0
ELEMENT_HEIGHT = 80.0
_WRAP_WIDTH = 22
_MAX_LINES = 3
_LINE_HEIGHT = 16.0
_FONT_SIZE = 12


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(diagram: Diagram) -> str:
    """Render as a plain directed graph; one node per element."""
    lines = ["digraph cpd {", "  rankdir=LR;"]
    for element in diagram.elements:
        shape, style = _DOT_SHAPES[shape_of(element.kind)]
        attrs = [f'label="{_dot_escape(element.label)}"', f"shape={shape}"]
        if style:
            attrs.append(f"style={style}")
        lines.append(f'  "{_dot_escape(element.id)}" [{", ".join(attrs)}];')
    connections = diagram.connection_map()
    for connection in diagram.connections:
        target_id = connection.target
        if connection.target_type is TargetType.CONNECTION:
            # DOT has no edge-to-edge arrows; point at the annotated
            # connection's target element instead.
            target_id = connections[connection.target].target
        edge = f'  "{_dot_escape(connection.source)}" -> "{_dot_escape(target_id)}"'
        if connection.kind is ConnectionKind.ANNOTATES:
            edge += " [style=dashed]"
        lines.append(edge + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _fmt(value: float) -> str:
    return f"{value:g}"


def _wrap_label(label: str) -> list[str]:
    wrapped = textwrap.wrap(label, width=_WRAP_WIDTH) or [""]
    if len(wrapped) > _MAX_LINES:
        wrapped = wrapped[: _MAX_LINES]
        wrapped[-1] = wrapped[-1][: _WRAP_WIDTH - 1] + "…"
    return wrapped


def _xml_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _shape_svg(element: Element, center: Point) -> str:
    half_w, half_h = ELEMENT_WIDTH / 2, ELEMENT_HEIGHT / 2
    cx, cy = center.x, center.y
    shape = shape_of(element.kind)
    if shape in (Shape.ROUNDED_RECTANGLE, Shape.RECTANGLE):
        radius = 14 if shape is Shape.ROUNDED_RECTANGLE else 0
        return (
            f'<rect x="{_fmt(cx - half_w)}" y="{_fmt(cy - half_h)}" '
            f'width="{_fmt(ELEMENT_WIDTH)}" height="{_fmt(ELEMENT_HEIGHT)}" '
            f'rx="{radius}"/>'
        )
    if shape is Shape.CIRCLE:
        return (
            f'<ellipse cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
            f'rx="{_fmt(half_w)}" ry="{_fmt(half_h)}"/>'
        )
    if shape is Shape.DIAMOND:
        points = [
            (cx, cy - half_h),
            (cx + half_w, cy),
            (cx, cy + half_h),
            (cx - half_w, cy),
        ]
    elif shape is Shape.OCTAGON:
        cut = 24.0
        points = [
            (cx - half_w + cut, cy - half_h),
            (cx + half_w - cut, cy - half_h),
            (cx + half_w, cy - half_h + cut / 2),
            (cx + half_w, cy + half_h - cut / 2),
            (cx + half_w - cut, cy + half_h),
            (cx - half_w + cut, cy + half_h),
            (cx - half_w, cy + half_h - cut / 2),
            (cx - half_w, cy - half_h + cut / 2),
        ]
    else:  # isosceles trapezoid, short edge on top
        points = [
            (cx - half_w + 30, cy - half_h),
            (cx + half_w - 30, cy - half_h),
            (cx + half_w, cy + half_h),
            (cx - half_w, cy + half_h),
        ]
    rendered = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return f'<polygon points="{rendered}"/>'


def _label_svg(element: Element, center: Point) -> str:
    lines = _wrap_label(element.label)
    start_y = center.y - (_LINE_HEIGHT * (len(lines) - 1)) / 2 + _FONT_SIZE / 3
    spans = "".join(
        f'<tspan x="{_fmt(center.x)}" y="{_fmt(start_y + i * _LINE_HEIGHT)}">'
        f"{_xml_escape(line)}</tspan>"
        for i, line in enumerate(lines)
    )
    return (
        f'<text text-anchor="middle" font-size="{_FONT_SIZE}" fill="#111" '
        f'stroke="none">{spans}</text>'
    )


def _clip_to_box(origin: Point, toward: Point) -> Point:
    """Point where the segment origin→toward crosses origin's element box."""
    dx, dy = toward.x - origin.x, toward.y - origin.y
    if dx == 0 and dy == 0:
        return origin
    scale = 1.0
    if dx != 0:
        scale = min(scale, (ELEMENT_WIDTH / 2) / abs(dx))
    if dy != 0:
        scale = min(scale, (ELEMENT_HEIGHT / 2) / abs(dy))
    return Point(origin.x + dx * scale, origin.y + dy * scale)


def to_svg(diagram: Diagram, config: LayoutConfig | None = None) -> str:
    """Render the laid-out diagram as SVG 1.1 text.

    Elements without positions are auto-laid-out first, so the output is a
    pure function of the diagram value and layout configuration.
    """
    if any(element.position is None for element in diagram.elements):
        diagram = layout(diagram, config=config or LayoutConfig())

    centers: dict[str, Point] = {
        element.id: element.position  # type: ignore[misc]
        for element in diagram.elements
    }
    connection_map = diagram.connection_map()

    edge_parts: list[str] = []
    for connection in diagram.connections:
        start = centers[connection.source]
        if connection.target_type is TargetType.ELEMENT:
            end = centers[connection.target]
            tip = _clip_to_box(end, start)
        else:
            target = connection_map[connection.target]
            a, b = centers[target.source], centers[target.target]
            tip = Point((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)
        tail = _clip_to_box(start, tip)
        dashed = (
            ' stroke-dasharray="6,4"'
            if connection.kind is ConnectionKind.ANNOTATES
            else ""
        )
        edge_parts.append(
            f'<line x1="{_fmt(tail.x)}" y1="{_fmt(tail.y)}" '
            f'x2="{_fmt(tip.x)}" y2="{_fmt(tip.y)}" stroke="#333"'
            f'{dashed} marker-end="url(#arrow)"/>'
        )

    node_parts: list[str] = []
    for element in diagram.elements:
        center = centers[element.id]
        node_parts.append(
            f'<g data-element="{_xml_escape(element.id)}" '
            f'data-kind="{element.kind.value}">'
            f"{_shape_svg(element, center)}{_label_svg(element, center)}</g>"
        )

    if centers:
        min_x = min(p.x for p in centers.values()) - ELEMENT_WIDTH
        min_y = min(p.y for p in centers.values()) - ELEMENT_HEIGHT
        max_x = max(p.x for p in centers.values()) + ELEMENT_WIDTH
        max_y = max(p.y for p in centers.values()) + ELEMENT_HEIGHT
    else:
        min_x, min_y, max_x, max_y = 0.0, 0.0, 200.0, 100.0

    view = f"{_fmt(min_x)} {_fmt(min_y)} {_fmt(max_x - min_x)} {_fmt(max_y - min_y)}"
    body = "\n".join(
        [
            "<defs>",
            '<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" '
            'markerWidth="7" markerHeight="7" orient="auto-start-reverse">',
            '<path d="M 0 0 L 10 5 L 0 10 z" fill="#333"/>',
            "</marker>",
            "</defs>",
            '<g fill="none" stroke="#333">',
            *edge_parts,
            "</g>",
            '<g fill="#fff" stroke="#333" stroke-width="1.5">',
            *node_parts,
            "</g>",
        ]
    )
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{view}">\n{body}\n</svg>\n'
    )
