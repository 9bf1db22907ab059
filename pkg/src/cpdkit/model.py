"""Core CPD domain model: element kinds, shapes, connections, diagrams.

Everything here is an immutable value. Editing a diagram means building a
new ``Diagram``; that makes the types safe to share across threads and
keeps equality structural.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Iterable, Mapping


class ElementKind(str, Enum):
    """The closed set of CPD component kinds."""

    STRATEGY = "strategy"
    MECHANISM = "mechanism"
    BARRIER = "barrier"
    MODERATOR = "moderator"
    PRECONDITION = "precondition"
    PROXIMAL_OUTCOME = "proximal_outcome"
    INTERMEDIATE_OUTCOME = "intermediate_outcome"
    DISTAL_OUTCOME = "distal_outcome"

    @property
    def display(self) -> str:
        """Lower-case human-readable name, e.g. ``"distal outcome"``."""
        return self.value.replace("_", " ")


class Shape(str, Enum):
    """Visual shapes a component can be drawn as."""

    ROUNDED_RECTANGLE = "rounded_rectangle"
    DIAMOND = "diamond"
    OCTAGON = "octagon"
    RECTANGLE = "rectangle"
    ISOSCELES_TRAPEZOID = "isosceles_trapezoid"
    CIRCLE = "circle"


# All three outcome kinds share CIRCLE; they differ by role, not look.
_KIND_SHAPES: dict[ElementKind, Shape] = {
    ElementKind.STRATEGY: Shape.ROUNDED_RECTANGLE,
    ElementKind.MECHANISM: Shape.DIAMOND,
    ElementKind.BARRIER: Shape.OCTAGON,
    ElementKind.MODERATOR: Shape.RECTANGLE,
    ElementKind.PRECONDITION: Shape.ISOSCELES_TRAPEZOID,
    ElementKind.PROXIMAL_OUTCOME: Shape.CIRCLE,
    ElementKind.INTERMEDIATE_OUTCOME: Shape.CIRCLE,
    ElementKind.DISTAL_OUTCOME: Shape.CIRCLE,
}

#: Kinds that may sit on the causal stem of a pathway.
STEM_KINDS: tuple[ElementKind, ...] = (
    ElementKind.STRATEGY,
    ElementKind.MECHANISM,
    ElementKind.BARRIER,
    ElementKind.PROXIMAL_OUTCOME,
    ElementKind.INTERMEDIATE_OUTCOME,
    ElementKind.DISTAL_OUTCOME,
)

#: Kinds that annotate the causal process instead of joining the stem.
ANNOTATION_KINDS: frozenset[ElementKind] = frozenset(
    {ElementKind.MODERATOR, ElementKind.PRECONDITION}
)

#: The five kinds a complete pathway must contain, in stem order.
REQUIRED_KINDS: tuple[ElementKind, ...] = (
    ElementKind.STRATEGY,
    ElementKind.MECHANISM,
    ElementKind.BARRIER,
    ElementKind.PROXIMAL_OUTCOME,
    ElementKind.DISTAL_OUTCOME,
)

#: Stable sort index per kind (declaration order of ElementKind).
KIND_ORDER: dict[ElementKind, int] = {kind: i for i, kind in enumerate(ElementKind)}


def shape_of(kind: ElementKind) -> Shape:
    """Return the fixed shape used to draw elements of ``kind``."""
    return _KIND_SHAPES[kind]


class ConnectionKind(str, Enum):
    CAUSAL = "causal"
    ANNOTATES = "annotates"


class TargetType(str, Enum):
    ELEMENT = "element"
    CONNECTION = "connection"


@dataclass(frozen=True)
class Point:
    x: float
    y: float


@dataclass(frozen=True)
class Element:
    """One diagram component. ``label`` may be empty while still drafting."""

    id: str
    kind: ElementKind
    label: str
    note: str | None = None
    position: Point | None = None


@dataclass(frozen=True)
class Connection:
    """A directed link. Causal links join elements along the pathway;
    annotates links attach a moderator/precondition to an element or to a
    causal connection."""

    id: str
    source: str
    target: str
    kind: ConnectionKind
    target_type: TargetType = TargetType.ELEMENT


def now_utc() -> datetime:
    """Current UTC time truncated to millisecond precision."""
    return truncate_ms(datetime.now(timezone.utc))


def truncate_ms(moment: datetime) -> datetime:
    """Normalize a timestamp to timezone-aware UTC with millisecond precision."""
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    moment = moment.astimezone(timezone.utc)
    return moment.replace(microsecond=(moment.microsecond // 1000) * 1000)


def new_id() -> str:
    """Fresh opaque identifier; never ordinal so merged boards cannot collide."""
    return str(uuid.uuid4())


@dataclass(frozen=True)
class Diagram:
    """A causal pathway diagram: elements, connections, and metadata.

    Construction validates referential structure (ids resolve, no
    self-loops, causal links target elements, annotations may target causal
    connections only). Whether the *kinds* are wired correctly is the
    checker's job, so that misdrawn pathways can still be loaded and
    diagnosed.
    """

    id: str
    title: str
    created: datetime
    modified: datetime
    elements: tuple[Element, ...] = ()
    connections: tuple[Connection, ...] = ()
    #: Unknown top-level document fields, preserved verbatim on round-trip.
    extras: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "connections", tuple(self.connections))
        object.__setattr__(self, "extras", dict(self.extras))
        object.__setattr__(self, "created", truncate_ms(self.created))
        object.__setattr__(self, "modified", truncate_ms(self.modified))
        _validate_structure(self.elements, self.connections)

    def element_map(self) -> dict[str, Element]:
        return {element.id: element for element in self.elements}

    def connection_map(self) -> dict[str, Connection]:
        return {connection.id: connection for connection in self.connections}

    def causal_connections(self) -> tuple[Connection, ...]:
        return tuple(c for c in self.connections if c.kind is ConnectionKind.CAUSAL)

    def with_positions(self, positions: Mapping[str, Point]) -> "Diagram":
        """Copy of this diagram with element positions replaced where given."""
        elements = tuple(
            replace(element, position=positions.get(element.id, element.position))
            for element in self.elements
        )
        return replace(self, elements=elements)


def _validate_structure(
    elements: tuple[Element, ...], connections: tuple[Connection, ...]
) -> None:
    element_ids: set[str] = set()
    for element in elements:
        if element.id in element_ids:
            raise ValueError(f"duplicate element id: {element.id!r}")
        element_ids.add(element.id)

    connection_ids: set[str] = set()
    for connection in connections:
        if connection.id in connection_ids:
            raise ValueError(f"duplicate connection id: {connection.id!r}")
        connection_ids.add(connection.id)

    by_id = {c.id: c for c in connections}
    for connection in connections:
        if connection.source not in element_ids:
            raise ValueError(
                f"connection {connection.id!r} source {connection.source!r} "
                "does not name an element"
            )
        if connection.target_type is TargetType.ELEMENT:
            if connection.target not in element_ids:
                raise ValueError(
                    f"connection {connection.id!r} target {connection.target!r} "
                    "does not name an element"
                )
            if connection.source == connection.target:
                raise ValueError(f"connection {connection.id!r} is a self-loop")
        else:
            if connection.kind is ConnectionKind.CAUSAL:
                raise ValueError(
                    f"causal connection {connection.id!r} must target an element"
                )
            if connection.target == connection.id:
                raise ValueError(f"connection {connection.id!r} targets itself")
            target = by_id.get(connection.target)
            if target is None:
                raise ValueError(
                    f"connection {connection.id!r} target {connection.target!r} "
                    "does not name a connection"
                )
            if target.kind is not ConnectionKind.CAUSAL:
                raise ValueError(
                    f"connection {connection.id!r} may only annotate a causal "
                    "connection"
                )


def new_element(
    kind: ElementKind,
    label: str = "",
    position: Point | None = None,
    note: str | None = None,
) -> Element:
    """Create an element with a fresh unique id.

    An empty label is legal: dropping a component on the board creates an
    empty entity whose content is filled in afterwards.
    """
    return Element(id=new_id(), kind=kind, label=label, note=note, position=position)


def new_connection(
    source: str,
    target: str,
    kind: ConnectionKind = ConnectionKind.CAUSAL,
    target_type: TargetType = TargetType.ELEMENT,
) -> Connection:
    return Connection(
        id=new_id(), source=source, target=target, kind=kind, target_type=target_type
    )


def new_diagram(
    title: str,
    elements: Iterable[Element] = (),
    connections: Iterable[Connection] = (),
    diagram_id: str | None = None,
) -> Diagram:
    stamp = now_utc()
    return Diagram(
        id=diagram_id or new_id(),
        title=title,
        created=stamp,
        modified=stamp,
        elements=tuple(elements),
        connections=tuple(connections),
    )
