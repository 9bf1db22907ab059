"""Element definitions served to tooltips, the help panel, and prompts.

The wording ships as a data file so it can evolve without code changes and
can be overridden with a custom file (``CPD_GLOSSARY_PATH`` or an explicit
path).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from .model import ElementKind


@dataclass(frozen=True)
class GlossaryEntry:
    kind: ElementKind
    definition: str
    guidance: str | None = None


class Glossary:
    """Fixed definition per element kind; read-only after load."""

    def __init__(self, entries: Mapping[ElementKind, GlossaryEntry]) -> None:
        missing = [kind.value for kind in ElementKind if kind not in entries]
        if missing:
            raise ValueError(f"glossary is missing kinds: {', '.join(missing)}")
        for kind, entry in entries.items():
            if not entry.definition.strip():
                raise ValueError(f"glossary definition for {kind.value} is empty")
        self._entries = {kind: entries[kind] for kind in ElementKind}

    def define(self, kind: ElementKind) -> GlossaryEntry:
        return self._entries[kind]

    def entries(self) -> tuple[GlossaryEntry, ...]:
        return tuple(self._entries.values())

    @classmethod
    def from_file(cls, path: str | Path) -> "Glossary":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls._from_obj(raw)

    @classmethod
    def _from_obj(cls, raw: dict) -> "Glossary":
        entries: dict[ElementKind, GlossaryEntry] = {}
        for key, value in raw.items():
            kind = ElementKind(key)
            entries[kind] = GlossaryEntry(
                kind=kind,
                definition=value["definition"],
                guidance=value.get("guidance"),
            )
        return cls(entries)


def load_glossary(path: str | Path | None = None) -> Glossary:
    """Load a glossary: explicit path, else CPD_GLOSSARY_PATH, else bundled."""
    if path is None:
        env = os.environ.get("CPD_GLOSSARY_PATH")
        path = Path(env) if env else None
    if path is not None:
        return Glossary.from_file(path)
    data = resources.files("cpdkit").joinpath("data/glossary.json").read_text("utf-8")
    return Glossary._from_obj(json.loads(data))
