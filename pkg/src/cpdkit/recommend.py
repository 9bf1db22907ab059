"""Backward-mapping wizard and brainstorming engine.

The wizard elicits the pathway back to front: distal outcome first, then
barrier, proximal outcome, strategy, and mechanism. Both the wizard and the
brainstorming feature build a prompt (element definitions prepended, then
the recommendation template), ask a chat backend for candidates, and parse
out at most five suggestions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from datetime import datetime
from enum import Enum
from typing import Any, Iterable

from .gateway import ChatBackend, CompletionRequest, GenerationParams
from .glossary import Glossary, load_glossary
from .layout import LayoutConfig, layout
from .serialize import format_timestamp
from .model import (
    STEM_KINDS,
    Connection,
    ConnectionKind,
    Diagram,
    Element,
    ElementKind,
    Point,
    TargetType,
    new_diagram,
    new_id,
    now_utc,
    truncate_ms,
)

INSTRUCTION_SUFFIX = (
    "Answer with a numbered list, one candidate per line, no explanations."
)

#: Kinds in the order the wizard collects them (backward mapping).
WIZARD_KIND_ORDER: tuple[ElementKind, ...] = (
    ElementKind.DISTAL_OUTCOME,
    ElementKind.BARRIER,
    ElementKind.PROXIMAL_OUTCOME,
    ElementKind.STRATEGY,
    ElementKind.MECHANISM,
)

#: Kinds in the order the materialized stem is connected (front to back).
STEM_CHAIN: tuple[ElementKind, ...] = (
    ElementKind.STRATEGY,
    ElementKind.MECHANISM,
    ElementKind.BARRIER,
    ElementKind.PROXIMAL_OUTCOME,
    ElementKind.DISTAL_OUTCOME,
)


class WizardStep(str, Enum):
    DISTAL_OUTCOME = "distal_outcome"
    BARRIER = "barrier"
    PROXIMAL_OUTCOME = "proximal_outcome"
    STRATEGY = "strategy"
    MECHANISM = "mechanism"
    DONE = "done"

    @property
    def kind(self) -> ElementKind:
        if self is WizardStep.DONE:
            raise SessionCompleteError("the wizard session is already complete")
        return ElementKind(self.value)


_STEP_SEQUENCE: tuple[WizardStep, ...] = (
    WizardStep.DISTAL_OUTCOME,
    WizardStep.BARRIER,
    WizardStep.PROXIMAL_OUTCOME,
    WizardStep.STRATEGY,
    WizardStep.MECHANISM,
    WizardStep.DONE,
)


class RecommendError(Exception):
    """Base class for wizard/brainstorm failures."""


class EmptyLabelError(RecommendError):
    pass


class SessionCompleteError(RecommendError):
    pass


class SessionIncompleteError(RecommendError):
    pass


class NoContextError(RecommendError):
    pass


class UnparsableOutputError(RecommendError):
    def __init__(self, message: str, raw: str) -> None:
        super().__init__(message)
        self.raw = raw


class SuggestionMode(str, Enum):
    WIZARD_NEXT = "wizard_next"
    BRAINSTORM = "brainstorm"


@dataclass(frozen=True)
class SuggestionRequest:
    """What to ask for: the target kind plus the known neighboring content.

    For the wizard the context is every previously accepted entry in
    acceptance order; for brainstorming it is the preceding and/or following
    component (in that order).
    """

    mode: SuggestionMode
    target_kind: ElementKind
    context: tuple[tuple[ElementKind, str], ...] = ()
    count: int = 5

    def __post_init__(self) -> None:
        for kind, label in self.context:
            if not label.strip():
                raise EmptyLabelError(f"context label for {kind.display} is empty")
        if (
            self.mode is SuggestionMode.WIZARD_NEXT
            and self.target_kind not in STEM_KINDS
        ):
            raise ValueError("the wizard only targets stem kinds")


@dataclass(frozen=True)
class Provenance:
    backend: str
    request_id: str


@dataclass(frozen=True)
class SuggestionResult:
    candidates: tuple[str, ...]
    raw: str
    provenance: Provenance


@dataclass(frozen=True)
class WizardSession:
    """State of one backward-mapping run. Immutable: each accepted entry
    produces a new session value one step further along."""

    id: str
    step: WizardStep
    entries: tuple[tuple[ElementKind, str], ...] = ()
    pending_suggestions: tuple[str, ...] = ()
    target_board: str | None = None
    distal_hint: str | None = None
    created: datetime = None  # type: ignore[assignment]
    modified: datetime = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        stamp = now_utc()
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(
            self, "pending_suggestions", tuple(self.pending_suggestions)
        )
        object.__setattr__(self, "created", truncate_ms(self.created or stamp))
        object.__setattr__(self, "modified", truncate_ms(self.modified or stamp))
        expected = WIZARD_KIND_ORDER[: _STEP_SEQUENCE.index(self.step)]
        got = tuple(kind for kind, _ in self.entries)
        if got != expected:
            raise ValueError(
                f"session entries {got} do not match completed steps {expected}"
            )
        for kind, label in self.entries:
            if not label.strip():
                raise ValueError(f"entry for {kind.display} has an empty label")

    @property
    def done(self) -> bool:
        return self.step is WizardStep.DONE

    def entry(self, kind: ElementKind) -> str | None:
        for entry_kind, label in self.entries:
            if entry_kind is kind:
                return label
        return None


def start_session(distal_hint: str | None = None) -> WizardSession:
    """Open a session at the distal-outcome step with no accepted entries."""
    return WizardSession(
        id=new_id(), step=WizardStep.DISTAL_OUTCOME, distal_hint=distal_hint
    )


def accept_entry(session: WizardSession, label: str) -> WizardSession:
    """Record the current step's content and advance one step."""
    if session.done:
        raise SessionCompleteError("the wizard session is already complete")
    label = label.strip()
    if not label:
        raise EmptyLabelError("entry label must not be empty")
    index = _STEP_SEQUENCE.index(session.step)
    return replace(
        session,
        step=_STEP_SEQUENCE[index + 1],
        entries=session.entries + ((session.step.kind, label),),
        pending_suggestions=(),
        modified=now_utc(),
    )


def with_pending_suggestions(
    session: WizardSession, candidates: Iterable[str]
) -> WizardSession:
    return replace(
        session, pending_suggestions=tuple(candidates), modified=now_utc()
    )


def _join_names(names: list[str]) -> str:
    if len(names) == 1:
        return names[0]
    return ", ".join(names[:-1]) + " and " + names[-1]


def definitions_preamble(glossary: Glossary) -> str:
    lines = ["Definitions of the causal pathway diagram elements:"]
    lines.extend(
        f"- {entry.kind.display}: {entry.definition}" for entry in glossary.entries()
    )
    return "\n".join(lines)


def _recommendation_user_text(
    header: str, context: tuple[tuple[ElementKind, str], ...]
) -> str:
    lines = [header]
    lines.extend(f"- {kind.display}: {label}" for kind, label in context)
    lines.extend(["", INSTRUCTION_SUFFIX])
    return "\n".join(lines)


def wizard_prompt_parts(
    target_kind: ElementKind,
    context: tuple[tuple[ElementKind, str], ...],
    glossary: Glossary,
) -> tuple[str, str]:
    """(system, user) texts for a wizard-step recommendation."""
    if context:
        names = _join_names([kind.display for kind, _ in context])
        header = (
            f"Based on the {names} the user have input, "
            f"recommend 5 possible {target_kind.display}:"
        )
    else:
        # First step: nothing has been entered yet, so there is nothing to
        # base the recommendation on.
        header = f"Recommend 5 possible {target_kind.display}:"
    return definitions_preamble(glossary), _recommendation_user_text(header, context)


def build_wizard_prompt(session: WizardSession, glossary: Glossary | None = None) -> str:
    """Full prompt text for the session's current step (definitions first)."""
    if session.done:
        raise SessionCompleteError("the wizard session is already complete")
    glossary = glossary or load_glossary()
    system, user = wizard_prompt_parts(session.step.kind, session.entries, glossary)
    return system + "\n\n" + user


def brainstorm_prompt_parts(
    request: SuggestionRequest, glossary: Glossary
) -> tuple[str, str]:
    """(system, user) texts for a brainstorming recommendation."""
    if not request.context:
        raise NoContextError(
            "brainstorming needs the preceding and/or following component"
        )
    names = _join_names([kind.display for kind, _ in request.context])
    header = (
        f"Based on the {names} the user has input, "
        f"recommend 5 possible {request.target_kind.display}:"
    )
    return definitions_preamble(glossary), _recommendation_user_text(
        header, request.context
    )


def build_brainstorm_prompt(
    request: SuggestionRequest, glossary: Glossary | None = None
) -> str:
    glossary = glossary or load_glossary()
    system, user = brainstorm_prompt_parts(request, glossary)
    return system + "\n\n" + user


_LIST_ITEM_RE = re.compile(r"^\s*(?:\d+[.)]|-)\s+(.*\S)\s*$")


def parse_candidates(text: str, count: int = 5) -> list[str]:
    """Extract up to ``count`` list items (``1.``, ``1)`` or ``-`` markers),
    trimmed, case-insensitively deduplicated, in order of appearance."""
    candidates: list[str] = []
    seen: set[str] = set()
    for line in text.splitlines():
        match = _LIST_ITEM_RE.match(line)
        if match is None:
            continue
        item = match.group(1).strip()
        key = item.casefold()
        if key in seen:
            continue
        seen.add(key)
        candidates.append(item)
        if len(candidates) == count:
            break
    return candidates


def suggest(
    request: SuggestionRequest,
    gateway: ChatBackend,
    glossary: Glossary | None = None,
    params: GenerationParams = GenerationParams(),
) -> SuggestionResult:
    """Ask the backend once and parse 1..5 candidates out of the completion."""
    glossary = glossary or load_glossary()
    if request.mode is SuggestionMode.WIZARD_NEXT:
        system, user = wizard_prompt_parts(
            request.target_kind, request.context, glossary
        )
    else:
        system, user = brainstorm_prompt_parts(request, glossary)
    response = gateway.complete(
        CompletionRequest(system=system, user=user, params=params)
    )
    candidates = parse_candidates(response.text, count=request.count)
    if not candidates:
        raise UnparsableOutputError(
            "no candidates could be parsed from the completion", raw=response.text
        )
    return SuggestionResult(
        candidates=tuple(candidates),
        raw=response.text,
        provenance=Provenance(
            backend=response.backend, request_id=response.request_id
        ),
    )


def suggest_for_session(
    session: WizardSession,
    gateway: ChatBackend,
    glossary: Glossary | None = None,
) -> tuple[SuggestionResult, WizardSession]:
    """Suggestions for the session's current step; returns the result and the
    session with pending suggestions recorded."""
    if session.done:
        raise SessionCompleteError("the wizard session is already complete")
    request = SuggestionRequest(
        mode=SuggestionMode.WIZARD_NEXT,
        target_kind=session.step.kind,
        context=session.entries,
    )
    result = suggest(request, gateway, glossary)
    return result, with_pending_suggestions(session, result.candidates)


def materialize(
    session: WizardSession,
    anchor: Point = Point(0.0, 0.0),
    config: LayoutConfig | None = None,
) -> Diagram:
    """Turn a completed session into a laid-out five-element pathway.

    The stem is connected front to back (strategy → mechanism → barrier →
    proximal outcome → distal outcome) and always checks clean.
    """
    if not session.done:
        raise SessionIncompleteError(
            f"the wizard session is still at step {session.step.value}"
        )
    by_kind = dict(session.entries)
    elements = [
        Element(id=new_id(), kind=kind, label=by_kind[kind]) for kind in STEM_CHAIN
    ]
    connections = [
        Connection(
            id=new_id(),
            source=source.id,
            target=target.id,
            kind=ConnectionKind.CAUSAL,
            target_type=TargetType.ELEMENT,
        )
        for source, target in zip(elements, elements[1:])
    ]
    diagram = new_diagram(
        title=by_kind[ElementKind.DISTAL_OUTCOME],
        elements=elements,
        connections=connections,
    )
    return layout(diagram, anchor=anchor, config=config or LayoutConfig())


def session_to_obj(session: WizardSession) -> dict[str, Any]:
    """Wire/storage form of a session."""
    return {
        "id": session.id,
        "step": session.step.value,
        "entries": {kind.value: label for kind, label in session.entries},
        "pending_suggestions": list(session.pending_suggestions),
        "target_board": session.target_board,
        "distal_hint": session.distal_hint,
        "created": format_timestamp(session.created),
        "modified": format_timestamp(session.modified),
    }


def session_from_obj(obj: dict[str, Any]) -> WizardSession:
    entries = tuple(
        (ElementKind(kind), label) for kind, label in obj.get("entries", {}).items()
    )
    return WizardSession(
        id=obj["id"],
        step=WizardStep(obj["step"]),
        entries=entries,
        pending_suggestions=tuple(obj.get("pending_suggestions", ())),
        target_board=obj.get("target_board"),
        distal_hint=obj.get("distal_hint"),
        created=_parse_ts(obj["created"]),
        modified=_parse_ts(obj["modified"]),
    )


def _parse_ts(raw: str) -> datetime:
    text = raw[:-1] + "+00:00" if raw.endswith("Z") else raw
    return datetime.fromisoformat(text)
