"""HTTP service exposing diagrams, checking, wizard, brainstorm, glossary.

A thin JSON layer over the library: every body is either the diagram file
format or a small wrapper around it. State lives in the file store;
per-document mutations are serialized by id-scoped locks. Single-user desk
tool: no auth, CORS open to the configured UI origin.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse

from . import gateway as gw
from .export import to_dot, to_svg
from .glossary import Glossary, load_glossary
from .layout import LayoutConfig, layout
from .model import Diagram, ElementKind, Point, new_id, now_utc
from .recommend import (
    EmptyLabelError,
    NoContextError,
    SessionCompleteError,
    SessionIncompleteError,
    SuggestionMode,
    SuggestionRequest,
    SuggestionResult,
    UnparsableOutputError,
    accept_entry,
    materialize,
    session_to_obj,
    start_session,
    suggest,
    suggest_for_session,
)
from .serialize import (
    DiagramSchemaError,
    diagram_from_obj,
    diagram_to_obj,
    format_timestamp,
)
from .store import NotFoundError, Store
from .validate import check, diagnostic_to_obj, report


@dataclass
class ServiceConfig:
    store_dir: Path
    host: str = "127.0.0.1"
    port: int = 8844
    mock: bool = False
    seed: int = 0
    cors_origins: tuple[str, ...] = ("*",)
    glossary_path: Path | None = None
    llm_timeout: float = gw.DEFAULT_TIMEOUT


class _LockMap:
    def __init__(self) -> None:
        self._guard = threading.Lock()
        self._locks: dict[str, threading.Lock] = {}

    def for_id(self, key: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(key, threading.Lock())


@dataclass
class _Runtime:
    config: ServiceConfig
    store: Store
    glossary: Glossary
    locks: _LockMap = field(default_factory=_LockMap)
    _backend: gw.ChatBackend | None = None
    _backend_guard: threading.Lock = field(default_factory=threading.Lock)

    def backend(self) -> gw.ChatBackend:
        with self._backend_guard:
            if self._backend is None:
                if self.config.mock:
                    self._backend = gw.MockChatBackend(seed=self.config.seed)
                else:
                    self._backend = gw.client_from_env(timeout=self.config.llm_timeout)
            return self._backend


def _http_error(status: int, error: str, message: str) -> HTTPException:
    return HTTPException(status_code=status, detail={"error": error, "message": message})


def _gateway_http_error(exc: Exception) -> HTTPException:
    if isinstance(exc, gw.AuthError):
        return _http_error(502, "auth", str(exc))
    if isinstance(exc, gw.RateLimited):
        return _http_error(503, "rate_limited", str(exc))
    if isinstance(exc, gw.GatewayTimeout):
        return _http_error(504, "timeout", str(exc))
    if isinstance(exc, gw.TransportError):
        return _http_error(502, "transport", str(exc))
    if isinstance(exc, UnparsableOutputError):
        return _http_error(502, "unparsable_output", str(exc))
    return _http_error(502, "gateway", str(exc))


def _parse_anchor(payload: dict[str, Any] | None) -> Point:
    raw = (payload or {}).get("anchor")
    if raw is None:
        return Point(0.0, 0.0)
    try:
        return Point(x=float(raw["x"]), y=float(raw["y"]))
    except (KeyError, TypeError, ValueError):
        raise _http_error(422, "schema", "anchor must be an object with numeric x and y")


def _parse_neighbor(field_name: str, raw: Any) -> tuple[ElementKind, str]:
    try:
        kind = ElementKind(raw["kind"])
        label = str(raw["label"])
    except (KeyError, TypeError, ValueError):
        raise _http_error(
            422, "schema", f"{field_name} must be an object with kind and label"
        )
    if not label.strip():
        raise _http_error(422, "schema", f"{field_name}.label must not be empty")
    return kind, label


def _suggestion_obj(result: SuggestionResult) -> dict[str, Any]:
    return {
        "candidates": list(result.candidates),
        "raw": result.raw,
        "provenance": {
            "backend": result.provenance.backend,
            "request_id": result.provenance.request_id,
        },
    }


def _diagram_from_payload(payload: Any, force_id: str | None = None) -> Diagram:
    if not isinstance(payload, dict):
        raise _http_error(422, "schema", "body must be a JSON object")
    payload = dict(payload)
    if force_id is not None:
        existing = payload.setdefault("id", force_id)
        if existing != force_id:
            raise _http_error(
                409, "conflict", f"body id {existing!r} does not match path id"
            )
    else:
        payload.setdefault("id", new_id())
    stamp = format_timestamp(now_utc())
    payload.setdefault("created", stamp)
    payload.setdefault("modified", stamp)
    try:
        return diagram_from_obj(payload)
    except DiagramSchemaError as exc:
        raise _http_error(422, "schema", str(exc)) from exc


def create_app(config: ServiceConfig) -> FastAPI:
    runtime = _Runtime(
        config=config,
        store=Store(config.store_dir),
        glossary=load_glossary(config.glossary_path),
    )
    app = FastAPI(title="cpdkit service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def load_diagram_or_404(diagram_id: str) -> Diagram:
        try:
            return runtime.store.load_diagram(diagram_id)
        except NotFoundError as exc:
            raise _http_error(404, "not_found", str(exc)) from exc

    def load_session_or_404(session_id: str):
        try:
            return runtime.store.load_session(session_id)
        except NotFoundError as exc:
            raise _http_error(404, "not_found", str(exc)) from exc

    @app.get("/health")
    def health() -> dict[str, str]:
        return {"status": "ok"}

    # -- diagrams ----------------------------------------------------------

    @app.post("/diagrams", status_code=201)
    def create_diagram(payload: dict = Body(...)) -> dict:
        diagram = _diagram_from_payload(payload)
        with runtime.locks.for_id(diagram.id):
            if runtime.store.has_diagram(diagram.id):
                raise _http_error(
                    409, "conflict", f"diagram {diagram.id!r} already exists"
                )
            runtime.store.save_diagram(diagram)
        return diagram_to_obj(diagram)

    @app.get("/diagrams")
    def list_diagrams() -> list[dict]:
        summaries = []
        for diagram_id in runtime.store.list_diagram_ids():
            diagram = runtime.store.load_diagram(diagram_id)
            obj = diagram_to_obj(diagram)
            summaries.append(
                {
                    "id": obj["id"],
                    "title": obj["title"],
                    "created": obj["created"],
                    "modified": obj["modified"],
                    "element_count": len(diagram.elements),
                }
            )
        return summaries

    @app.get("/diagrams/{diagram_id}")
    def get_diagram(diagram_id: str) -> dict:
        return diagram_to_obj(load_diagram_or_404(diagram_id))

    @app.put("/diagrams/{diagram_id}")
    def put_diagram(diagram_id: str, payload: dict = Body(...)) -> dict:
        diagram = _diagram_from_payload(payload, force_id=diagram_id)
        with runtime.locks.for_id(diagram_id):
            runtime.store.save_diagram(diagram)
        return diagram_to_obj(diagram)

    @app.delete("/diagrams/{diagram_id}", status_code=204)
    def delete_diagram(diagram_id: str) -> Response:
        with runtime.locks.for_id(diagram_id):
            try:
                runtime.store.delete_diagram(diagram_id)
            except NotFoundError as exc:
                raise _http_error(404, "not_found", str(exc)) from exc
        return Response(status_code=204)

    @app.post("/diagrams/{diagram_id}/check")
    def check_diagram(diagram_id: str) -> dict:
        diagnostics = check(load_diagram_or_404(diagram_id))
        return {
            "diagnostics": [diagnostic_to_obj(d) for d in diagnostics],
            "report": report(diagnostics),
        }

    @app.post("/diagrams/{diagram_id}/layout")
    def layout_diagram(diagram_id: str, payload: dict | None = Body(None)) -> dict:
        anchor = _parse_anchor(payload)
        with runtime.locks.for_id(diagram_id):
            diagram = load_diagram_or_404(diagram_id)
            positioned = replace(
                layout(diagram, anchor=anchor, config=LayoutConfig()),
                modified=now_utc(),
            )
            runtime.store.save_diagram(positioned)
        return diagram_to_obj(positioned)

    @app.get("/diagrams/{diagram_id}/export")
    def export_diagram(diagram_id: str, format: str) -> Response:
        diagram = load_diagram_or_404(diagram_id)
        if format == "dot":
            return PlainTextResponse(to_dot(diagram), media_type="text/vnd.graphviz")
        if format == "svg":
            return Response(to_svg(diagram), media_type="image/svg+xml")
        raise _http_error(422, "schema", f"unknown export format: {format!r}")

    # -- wizard ------------------------------------------------------------

    @app.post("/wizard/sessions", status_code=201)
    def create_session(payload: dict | None = Body(None)) -> dict:
        hint = (payload or {}).get("distal_hint")
        session = start_session(distal_hint=hint)
        runtime.store.save_session(session)
        return session_to_obj(session)

    @app.get("/wizard/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return session_to_obj(load_session_or_404(session_id))

    @app.post("/wizard/sessions/{session_id}/suggest")
    def suggest_session(session_id: str) -> dict:
        with runtime.locks.for_id(session_id):
            session = load_session_or_404(session_id)
            try:
                result, session = suggest_for_session(
                    session, runtime.backend(), runtime.glossary
                )
            except SessionCompleteError as exc:
                raise _http_error(409, "session_complete", str(exc)) from exc
            except gw.GatewayError as exc:
                raise _gateway_http_error(exc) from exc
            except UnparsableOutputError as exc:
                raise _gateway_http_error(exc) from exc
            runtime.store.save_session(session)
        return _suggestion_obj(result)

    @app.post("/wizard/sessions/{session_id}/accept")
    def accept_session_entry(session_id: str, payload: dict = Body(...)) -> dict:
        label = payload.get("label")
        if not isinstance(label, str):
            raise _http_error(422, "schema", "body must carry a string label")
        with runtime.locks.for_id(session_id):
            session = load_session_or_404(session_id)
            try:
                session = accept_entry(session, label)
            except EmptyLabelError as exc:
                raise _http_error(422, "empty_label", str(exc)) from exc
            except SessionCompleteError as exc:
                raise _http_error(409, "session_complete", str(exc)) from exc
            runtime.store.save_session(session)
        return session_to_obj(session)

    @app.post("/wizard/sessions/{session_id}/materialize")
    def materialize_session(
        session_id: str, payload: dict | None = Body(None)
    ) -> dict:
        anchor = _parse_anchor(payload)
        board_id = (payload or {}).get("board_id")
        with runtime.locks.for_id(session_id):
            session = load_session_or_404(session_id)
            try:
                produced = materialize(session, anchor=anchor)
            except SessionIncompleteError as exc:
                raise _http_error(409, "session_incomplete", str(exc)) from exc
            if board_id is not None:
                with runtime.locks.for_id(board_id):
                    board = load_diagram_or_404(board_id)
                    merged = replace(
                        board,
                        elements=board.elements + produced.elements,
                        connections=board.connections + produced.connections,
                        modified=now_utc(),
                    )
                    runtime.store.save_diagram(merged)
                result = merged
            else:
                runtime.store.save_diagram(produced)
                result = produced
            runtime.store.save_session(replace(session, target_board=result.id))
        return diagram_to_obj(result)

    # -- brainstorm --------------------------------------------------------

    @app.post("/brainstorm")
    def brainstorm(payload: dict = Body(...)) -> dict:
        try:
            target = ElementKind(payload.get("target_kind"))
        except ValueError:
            raise _http_error(
                422, "schema", f"unknown target_kind: {payload.get('target_kind')!r}"
            ) from None
        context: list[tuple[ElementKind, str]] = []
        for field_name in ("before", "after"):
            raw = payload.get(field_name)
            if raw is not None:
                context.append(_parse_neighbor(field_name, raw))
        try:
            request = SuggestionRequest(
                mode=SuggestionMode.BRAINSTORM,
                target_kind=target,
                context=tuple(context),
            )
            result = suggest(request, runtime.backend(), runtime.glossary)
        except NoContextError as exc:
            raise _http_error(422, "no_context", str(exc)) from exc
        except EmptyLabelError as exc:
            raise _http_error(422, "empty_label", str(exc)) from exc
        except (gw.GatewayError, UnparsableOutputError) as exc:
            raise _gateway_http_error(exc) from exc
        return _suggestion_obj(result)

    # -- glossary ----------------------------------------------------------

    @app.get("/glossary")
    def glossary_all() -> list[dict]:
        return [
            {
                "kind": entry.kind.value,
                "definition": entry.definition,
                "guidance": entry.guidance,
            }
            for entry in runtime.glossary.entries()
        ]

    @app.get("/glossary/{kind}")
    def glossary_one(kind: str) -> dict:
        try:
            element_kind = ElementKind(kind)
        except ValueError:
            raise _http_error(404, "not_found", f"unknown element kind: {kind!r}") from None
        entry = runtime.glossary.define(element_kind)
        return {
            "kind": entry.kind.value,
            "definition": entry.definition,
            "guidance": entry.guidance,
        }

    return app


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted; fails fast with a clear message if
    the store is unwritable or the port cannot be bound."""
    import uvicorn

    try:
        store = Store(config.store_dir)
        probe = store.root / ".write-probe"
        probe.write_text("ok", encoding="utf-8")
        probe.unlink()
    except OSError as exc:
        raise SystemExit(
            f"store directory {config.store_dir} is not writable: {exc}"
        ) from exc

    app = create_app(config)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    except OSError as exc:
        raise SystemExit(
            f"could not bind {config.host}:{config.port}: {exc}"
        ) from exc
