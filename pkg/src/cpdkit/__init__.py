"""Causal pathway diagram toolkit.

A diagram model with structural checking, a backward-mapping wizard and
brainstorming engine driven by chat-completion suggestions, a glossary,
deterministic layout and DOT/SVG export, plus a file-backed HTTP service
and CLI.
"""

from .glossary import Glossary, GlossaryEntry, load_glossary
from .layout import LayoutConfig, layout
from .model import (
    ANNOTATION_KINDS,
    REQUIRED_KINDS,
    STEM_KINDS,
    Connection,
    ConnectionKind,
    Diagram,
    Element,
    ElementKind,
    Point,
    Shape,
    TargetType,
    new_connection,
    new_diagram,
    new_element,
    shape_of,
)
from .serialize import (
    DiagramParseError,
    DiagramSchemaError,
    deserialize,
    diagram_from_obj,
    diagram_to_obj,
    serialize,
)
from .validate import Diagnostic, DiagnosticCode, Severity, check, report

__all__ = [
    "ANNOTATION_KINDS",
    "REQUIRED_KINDS",
    "STEM_KINDS",
    "Connection",
    "ConnectionKind",
    "Diagnostic",
    "DiagnosticCode",
    "Diagram",
    "DiagramParseError",
    "DiagramSchemaError",
    "Element",
    "ElementKind",
    "Glossary",
    "GlossaryEntry",
    "LayoutConfig",
    "Point",
    "Severity",
    "Shape",
    "TargetType",
    "check",
    "deserialize",
    "diagram_from_obj",
    "diagram_to_obj",
    "layout",
    "load_glossary",
    "new_connection",
    "new_diagram",
    "new_element",
    "report",
    "serialize",
    "shape_of",
]

__version__ = "0.1.0"
