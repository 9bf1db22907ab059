"""Diagram file format: UTF-8 JSON documents, round-trip safe.

Top-level fields are ``id``, ``title``, ``created``, ``modified``
(ISO-8601), ``elements`` and ``connections``. Unknown top-level fields are
preserved across a round-trip; unknown fields inside elements or
connections are rejected so typos cannot silently drop data.
"""

from __future__ import annotations

import json
from datetime import datetime
from typing import Any

from .model import (
    Connection,
    ConnectionKind,
    Diagram,
    Element,
    ElementKind,
    Point,
    TargetType,
)

_TOP_LEVEL_FIELDS = ("id", "title", "created", "modified", "elements", "connections")
_ELEMENT_FIELDS = {"id", "kind", "label", "note", "position"}
_CONNECTION_FIELDS = {"id", "source", "target", "target_type", "kind"}


class DiagramParseError(ValueError):
    """The input is not well-formed JSON. Carries the failing position."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DiagramSchemaError(ValueError):
    """Well-formed JSON that is not a valid diagram. Names the bad field."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


def format_timestamp(moment: datetime) -> str:
    # Diagram normalizes timestamps to UTC at millisecond precision.
    return moment.strftime("%Y-%m-%dT%H:%M:%S.") + f"{moment.microsecond // 1000:03d}Z"


def _parse_timestamp(field: str, raw: Any) -> datetime:
    if not isinstance(raw, str):
        raise DiagramSchemaError(field, "must be an ISO-8601 timestamp string")
    text = raw[:-1] + "+00:00" if raw.endswith("Z") else raw
    try:
        moment = datetime.fromisoformat(text)
    except ValueError:
        raise DiagramSchemaError(field, f"invalid ISO-8601 timestamp: {raw!r}") from None
    if moment.tzinfo is None:
        raise DiagramSchemaError(field, "timestamp must carry a timezone offset")
    return moment


def _require_str(field: str, value: Any, allow_empty: bool = True) -> str:
    if not isinstance(value, str):
        raise DiagramSchemaError(field, "must be a string")
    if not allow_empty and not value:
        raise DiagramSchemaError(field, "must not be empty")
    return value


def _parse_position(field: str, raw: Any) -> Point:
    if not isinstance(raw, dict):
        raise DiagramSchemaError(field, "must be an object with x and y")
    unknown = sorted(set(raw) - {"x", "y"})
    if unknown:
        raise DiagramSchemaError(f"{field}.{unknown[0]}", "unknown field")
    for axis in ("x", "y"):
        if axis not in raw:
            raise DiagramSchemaError(f"{field}.{axis}", "missing required field")
        if not isinstance(raw[axis], (int, float)) or isinstance(raw[axis], bool):
            raise DiagramSchemaError(f"{field}.{axis}", "must be a number")
    return Point(x=float(raw["x"]), y=float(raw["y"]))


def _parse_element(index: int, raw: Any) -> Element:
    field = f"elements[{index}]"
    if not isinstance(raw, dict):
        raise DiagramSchemaError(field, "must be an object")
    unknown = sorted(set(raw) - _ELEMENT_FIELDS)
    if unknown:
        raise DiagramSchemaError(f"{field}.{unknown[0]}", "unknown field")
    for required in ("id", "kind", "label"):
        if required not in raw:
            raise DiagramSchemaError(f"{field}.{required}", "missing required field")
    kind_raw = _require_str(f"{field}.kind", raw["kind"])
    try:
        kind = ElementKind(kind_raw)
    except ValueError:
        raise DiagramSchemaError(
            f"{field}.kind", f"unknown element kind: {kind_raw!r}"
        ) from None
    note = raw.get("note")
    if note is not None:
        note = _require_str(f"{field}.note", note)
    position = raw.get("position")
    if position is not None:
        position = _parse_position(f"{field}.position", position)
    return Element(
        id=_require_str(f"{field}.id", raw["id"], allow_empty=False),
        kind=kind,
        label=_require_str(f"{field}.label", raw["label"]),
        note=note,
        position=position,
    )


def _parse_connection(index: int, raw: Any) -> Connection:
    field = f"connections[{index}]"
    if not isinstance(raw, dict):
        raise DiagramSchemaError(field, "must be an object")
    unknown = sorted(set(raw) - _CONNECTION_FIELDS)
    if unknown:
        raise DiagramSchemaError(f"{field}.{unknown[0]}", "unknown field")
    for required in ("id", "source", "target", "target_type", "kind"):
        if required not in raw:
            raise DiagramSchemaError(f"{field}.{required}", "missing required field")
    kind_raw = _require_str(f"{field}.kind", raw["kind"])
    try:
        kind = ConnectionKind(kind_raw)
    except ValueError:
        raise DiagramSchemaError(
            f"{field}.kind", f"unknown connection kind: {kind_raw!r}"
        ) from None
    target_type_raw = _require_str(f"{field}.target_type", raw["target_type"])
    try:
        target_type = TargetType(target_type_raw)
    except ValueError:
        raise DiagramSchemaError(
            f"{field}.target_type", f"unknown target type: {target_type_raw!r}"
        ) from None
    return Connection(
        id=_require_str(f"{field}.id", raw["id"], allow_empty=False),
        source=_require_str(f"{field}.source", raw["source"], allow_empty=False),
        target=_require_str(f"{field}.target", raw["target"], allow_empty=False),
        kind=kind,
        target_type=target_type,
    )


def _check_references(
    elements: list[Element], connections: list[Connection]
) -> None:
    element_ids: set[str] = set()
    for index, element in enumerate(elements):
        if element.id in element_ids:
            raise DiagramSchemaError(
                f"elements[{index}].id", f"duplicate element id: {element.id!r}"
            )
        element_ids.add(element.id)

    connection_ids: set[str] = set()
    for index, connection in enumerate(connections):
        if connection.id in connection_ids:
            raise DiagramSchemaError(
                f"connections[{index}].id",
                f"duplicate connection id: {connection.id!r}",
            )
        connection_ids.add(connection.id)

    by_id = {c.id: c for c in connections}
    for index, connection in enumerate(connections):
        field = f"connections[{index}]"
        if connection.source not in element_ids:
            raise DiagramSchemaError(
                f"{field}.source", f"dangling element id: {connection.source!r}"
            )
        if connection.target_type is TargetType.ELEMENT:
            if connection.target not in element_ids:
                raise DiagramSchemaError(
                    f"{field}.target", f"dangling element id: {connection.target!r}"
                )
            if connection.source == connection.target:
                raise DiagramSchemaError(f"{field}.target", "self-loop is not allowed")
        else:
            if connection.kind is ConnectionKind.CAUSAL:
                raise DiagramSchemaError(
                    f"{field}.target_type", "causal connections must target an element"
                )
            if connection.target == connection.id:
                raise DiagramSchemaError(f"{field}.target", "self-loop is not allowed")
            target = by_id.get(connection.target)
            if target is None:
                raise DiagramSchemaError(
                    f"{field}.target", f"dangling connection id: {connection.target!r}"
                )
            if target.kind is not ConnectionKind.CAUSAL:
                raise DiagramSchemaError(
                    f"{field}.target", "only causal connections can be annotated"
                )


def diagram_from_obj(obj: Any) -> Diagram:
    """Build a Diagram from already-parsed JSON, or raise DiagramSchemaError."""
    if not isinstance(obj, dict):
        raise DiagramSchemaError("$", "document must be a JSON object")
    for required in _TOP_LEVEL_FIELDS:
        if required not in obj:
            raise DiagramSchemaError(required, "missing required field")
    if not isinstance(obj["elements"], list):
        raise DiagramSchemaError("elements", "must be an array")
    if not isinstance(obj["connections"], list):
        raise DiagramSchemaError("connections", "must be an array")

    elements = [_parse_element(i, raw) for i, raw in enumerate(obj["elements"])]
    connections = [_parse_connection(i, raw) for i, raw in enumerate(obj["connections"])]
    _check_references(elements, connections)

    extras = {key: value for key, value in obj.items() if key not in _TOP_LEVEL_FIELDS}
    try:
        return Diagram(
            id=_require_str("id", obj["id"], allow_empty=False),
            title=_require_str("title", obj["title"]),
            created=_parse_timestamp("created", obj["created"]),
            modified=_parse_timestamp("modified", obj["modified"]),
            elements=tuple(elements),
            connections=tuple(connections),
            extras=extras,
        )
    except ValueError as exc:
        if isinstance(exc, DiagramSchemaError):
            raise
        raise DiagramSchemaError("$", str(exc)) from exc


def deserialize(text: str) -> Diagram:
    """Parse a diagram document.

    Raises DiagramParseError (with line/column) for malformed JSON and
    DiagramSchemaError (naming the field) for well-formed but invalid
    documents. A diagram is returned only if every structural invariant
    holds; there is no partially-valid result.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramParseError(exc.msg, exc.lineno, exc.colno) from exc
    return diagram_from_obj(obj)


def diagram_to_obj(diagram: Diagram) -> dict[str, Any]:
    elements = []
    for element in diagram.elements:
        raw: dict[str, Any] = {
            "id": element.id,
            "kind": element.kind.value,
            "label": element.label,
        }
        if element.note is not None:
            raw["note"] = element.note
        if element.position is not None:
            raw["position"] = {"x": element.position.x, "y": element.position.y}
        elements.append(raw)
    connections = [
        {
            "id": connection.id,
            "source": connection.source,
            "target": connection.target,
            "target_type": connection.target_type.value,
            "kind": connection.kind.value,
        }
        for connection in diagram.connections
    ]
    obj: dict[str, Any] = {
        "id": diagram.id,
        "title": diagram.title,
        "created": format_timestamp(diagram.created),
        "modified": format_timestamp(diagram.modified),
        "elements": elements,
        "connections": connections,
    }
    obj.update(diagram.extras)
    return obj


def serialize(diagram: Diagram) -> str:
    """Render a diagram as its canonical JSON document."""
    return json.dumps(diagram_to_obj(diagram), ensure_ascii=False, indent=2) + "\n"
