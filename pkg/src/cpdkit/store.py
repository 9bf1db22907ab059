"""File-backed persistence for diagrams and wizard sessions.

One JSON document per diagram/session under the store root. Writes go to a
temp file in the same directory and are renamed into place, so a crash
mid-write can never corrupt an existing document; leftover temp files are
hidden (dot-prefixed) and ignored by listings.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from urllib.parse import quote, unquote

from .model import Diagram
from .recommend import WizardSession, session_from_obj, session_to_obj
from .serialize import deserialize, serialize


class StoreError(Exception):
    pass


class NotFoundError(StoreError):
    pass


def _atomic_write(path: Path, text: str) -> None:
    handle = tempfile.NamedTemporaryFile(
        mode="w",
        encoding="utf-8",
        dir=path.parent,
        prefix=".tmp-",
        suffix=".json",
        delete=False,
    )
    try:
        with handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(handle.name, path)
    except BaseException:
        try:
            os.unlink(handle.name)
        except OSError:
            pass
        raise


def _filename(identifier: str) -> str:
    # Quote so any opaque id becomes a single safe path component; dots are
    # encoded as well so no document name can collide with hidden temp files.
    return quote(identifier, safe="").replace(".", "%2E") + ".json"


class Store:
    """Documents live in ``root/diagrams`` and ``root/sessions``; the
    directory contents are the index."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)
        self._diagrams = self.root / "diagrams"
        self._sessions = self.root / "sessions"
        self._diagrams.mkdir(parents=True, exist_ok=True)
        self._sessions.mkdir(parents=True, exist_ok=True)

    # -- diagrams ----------------------------------------------------------

    def diagram_path(self, diagram_id: str) -> Path:
        return self._diagrams / _filename(diagram_id)

    def save_diagram(self, diagram: Diagram) -> Path:
        path = self.diagram_path(diagram.id)
        _atomic_write(path, serialize(diagram))
        return path

    def load_diagram(self, diagram_id: str) -> Diagram:
        try:
            text = self.diagram_path(diagram_id).read_text(encoding="utf-8")
        except FileNotFoundError:
            raise NotFoundError(f"no diagram with id {diagram_id!r}") from None
        return deserialize(text)

    def has_diagram(self, diagram_id: str) -> bool:
        return self.diagram_path(diagram_id).exists()

    def delete_diagram(self, diagram_id: str) -> None:
        try:
            self.diagram_path(diagram_id).unlink()
        except FileNotFoundError:
            raise NotFoundError(f"no diagram with id {diagram_id!r}") from None

    def list_diagram_ids(self) -> list[str]:
        return _list_ids(self._diagrams)

    # -- wizard sessions ---------------------------------------------------

    def session_path(self, session_id: str) -> Path:
        return self._sessions / _filename(session_id)

    def save_session(self, session: WizardSession) -> Path:
        path = self.session_path(session.id)
        text = json.dumps(session_to_obj(session), ensure_ascii=False, indent=2) + "\n"
        _atomic_write(path, text)
        return path

    def load_session(self, session_id: str) -> WizardSession:
        try:
            text = self.session_path(session_id).read_text(encoding="utf-8")
        except FileNotFoundError:
            raise NotFoundError(f"no session with id {session_id!r}") from None
        return session_from_obj(json.loads(text))

    def delete_session(self, session_id: str) -> None:
        try:
            self.session_path(session_id).unlink()
        except FileNotFoundError:
            raise NotFoundError(f"no session with id {session_id!r}") from None

    def list_session_ids(self) -> list[str]:
        return _list_ids(self._sessions)


def _list_ids(directory: Path) -> list[str]:
    ids = [
        unquote(entry.name[: -len(".json")])
        for entry in directory.iterdir()
        if entry.suffix == ".json" and not entry.name.startswith(".")
    ]
    return sorted(ids)
