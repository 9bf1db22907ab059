"""Command-line interface: check, export, wizard, brainstorm, serve.

Exit codes: 0 clean, 1 checking found errors, 2 unreadable/invalid input,
3 completion-backend failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import gateway as gw
from .export import to_dot, to_svg
from .glossary import load_glossary
from .layout import LayoutConfig
from .model import Diagram, ElementKind, Point
from .recommend import (
    EmptyLabelError,
    SuggestionMode,
    SuggestionRequest,
    UnparsableOutputError,
    accept_entry,
    materialize,
    start_session,
    suggest,
    suggest_for_session,
)
from .serialize import DiagramParseError, DiagramSchemaError, deserialize, serialize
from .store import Store
from .validate import Severity, check, diagnostic_to_obj, report

EXIT_ISSUES = 1
EXIT_BAD_INPUT = 2
EXIT_GATEWAY = 3


def _load_diagram(path: str) -> Diagram:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        click.echo(f"cannot read {path}: {exc}", err=True)
        sys.exit(EXIT_BAD_INPUT)
    try:
        return deserialize(text)
    except (DiagramParseError, DiagramSchemaError) as exc:
        click.echo(f"{path}: {exc}", err=True)
        sys.exit(EXIT_BAD_INPUT)


def _make_backend(mock: bool, seed: int) -> gw.ChatBackend:
    if mock:
        return gw.MockChatBackend(seed=seed)
    try:
        return gw.client_from_env()
    except gw.GatewayError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_GATEWAY)


def _parse_neighbor(option: str, raw: str) -> tuple[ElementKind, str]:
    kind_name, sep, label = raw.partition(":")
    if not sep or not label.strip():
        raise click.UsageError(f"--{option} must look like kind:content")
    try:
        kind = ElementKind(kind_name.strip().lower().replace(" ", "_"))
    except ValueError:
        raise click.UsageError(f"--{option}: unknown element kind {kind_name!r}")
    return kind, label.strip()


mock_option = click.option(
    "--mock/--no-mock", default=False, help="Use the deterministic offline backend."
)
seed_option = click.option(
    "--seed", type=int, default=0, show_default=True, help="Seed for the mock backend."
)


@click.group()
def main() -> None:
    """Author, check, and export causal pathway diagrams."""


@main.command("check")
@click.argument("path", type=click.Path())
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["text", "json"]),
    default="text",
    show_default=True,
    help="Report as human-readable text or as the raw diagnostics array.",
)
def cli_check(path: str, fmt: str) -> None:
    """Check a diagram file; exit 1 if errors are found, 2 if unreadable."""
    diagram = _load_diagram(path)
    diagnostics = check(diagram)
    if fmt == "json":
        click.echo(json.dumps([diagnostic_to_obj(d) for d in diagnostics], indent=2))
    else:
        click.echo(report(diagnostics))
    if any(d.severity is Severity.ERROR for d in diagnostics):
        sys.exit(EXIT_ISSUES)


@main.command("export")
@click.argument("path", type=click.Path())
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["dot", "svg"]),
    required=True,
    help="Output format.",
)
@click.option(
    "--out",
    "-o",
    type=click.Path(),
    default=None,
    help="Output file (default: stdout).",
)
def cli_export(path: str, fmt: str, out: str | None) -> None:
    """Export a diagram file to DOT or SVG."""
    diagram = _load_diagram(path)
    rendered = to_dot(diagram) if fmt == "dot" else to_svg(diagram)
    if out:
        Path(out).write_text(rendered, encoding="utf-8")
        click.echo(f"wrote {out}")
    else:
        click.echo(rendered, nl=False)


@main.command("brainstorm")
@click.option("--kind", "kind_name", required=True, help="Element kind to brainstorm.")
@click.option("--before", default=None, help="Preceding component as kind:content.")
@click.option("--after", default=None, help="Following component as kind:content.")
@mock_option
@seed_option
def cli_brainstorm(
    kind_name: str, before: str | None, after: str | None, mock: bool, seed: int
) -> None:
    """Print up to five candidates for a component, one per line."""
    try:
        target = ElementKind(kind_name.strip().lower().replace(" ", "_"))
    except ValueError:
        raise click.UsageError(f"unknown element kind {kind_name!r}")
    context: list[tuple[ElementKind, str]] = []
    if before:
        context.append(_parse_neighbor("before", before))
    if after:
        context.append(_parse_neighbor("after", after))
    if not context:
        raise click.UsageError("give at least one of --before/--after")
    backend = _make_backend(mock, seed)
    try:
        result = suggest(
            SuggestionRequest(
                mode=SuggestionMode.BRAINSTORM,
                target_kind=target,
                context=tuple(context),
            ),
            backend,
        )
    except (gw.GatewayError, UnparsableOutputError) as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_GATEWAY)
    for candidate in result.candidates:
        click.echo(candidate)


@main.command("wizard")
@click.option("--out", "-o", type=click.Path(), default=None, help="Diagram file to write.")
@click.option(
    "--store",
    "store_dir",
    type=click.Path(file_okay=False),
    default=None,
    help="Persist the session (and the diagram) in this store directory.",
)
@click.option("--distal-hint", default=None, help="Pre-fill for the first step.")
@click.option(
    "--suggest/--no-suggest",
    "want_suggestions",
    default=True,
    help="Fetch suggestions at each step.",
)
@click.option("--anchor", nargs=2, type=float, default=(0.0, 0.0), help="Board anchor x y.")
@mock_option
@seed_option
def cli_wizard(
    out: str | None,
    store_dir: str | None,
    distal_hint: str | None,
    want_suggestions: bool,
    anchor: tuple[float, float],
    mock: bool,
    seed: int,
) -> None:
    """Build a pathway step by step (distal outcome backwards) and write it."""
    glossary = load_glossary()
    backend = _make_backend(mock, seed) if want_suggestions else None
    store = Store(store_dir) if store_dir else None
    session = start_session(distal_hint=distal_hint)
    if store:
        store.save_session(session)

    total = 5
    step_number = 0
    while not session.done:
        step_number += 1
        kind = session.step.kind
        entry = glossary.define(kind)
        click.echo(f"\n[{step_number}/{total}] {kind.display}")
        if entry.guidance:
            click.echo(entry.guidance)
        candidates: tuple[str, ...] = ()
        if backend is not None:
            try:
                result, session = suggest_for_session(session, backend, glossary)
            except (gw.GatewayError, UnparsableOutputError) as exc:
                click.echo(str(exc), err=True)
                sys.exit(EXIT_GATEWAY)
            candidates = result.candidates
            for index, candidate in enumerate(candidates, start=1):
                click.echo(f"  {index}. {candidate}")
        prompt_text = (
            "Your answer (or a suggestion number)" if candidates else "Your answer"
        )
        default = distal_hint if step_number == 1 and distal_hint else None
        while True:
            answer = click.prompt(prompt_text, default=default, show_default=True)
            answer = answer.strip()
            if answer.isdigit() and candidates and 1 <= int(answer) <= len(candidates):
                answer = candidates[int(answer) - 1]
            try:
                session = accept_entry(session, answer)
                break
            except EmptyLabelError:
                click.echo("Please enter some content.")
        if store:
            store.save_session(session)

    diagram = materialize(session, anchor=Point(*anchor), config=LayoutConfig())
    if store:
        store.save_diagram(diagram)
    out_path = Path(out) if out else Path(f"cpd-{diagram.id}.json")
    out_path.write_text(serialize(diagram), encoding="utf-8")
    click.echo(f"\nwrote {out_path}")
    click.echo(report(check(diagram)))


@main.command("serve")
@click.option(
    "--store",
    "store_dir",
    type=click.Path(file_okay=False),
    required=True,
    help="Directory for diagrams and sessions.",
)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8844, show_default=True)
@click.option(
    "--cors-origin",
    "cors_origins",
    multiple=True,
    help="Allowed UI origin; repeatable. Defaults to any origin.",
)
@click.option("--glossary", "glossary_path", type=click.Path(exists=True), default=None)
@mock_option
@seed_option
def cli_serve(
    store_dir: str,
    host: str,
    port: int,
    cors_origins: tuple[str, ...],
    glossary_path: str | None,
    mock: bool,
    seed: int,
) -> None:
    """Run the HTTP service backing the whiteboard UI."""
    from .service import ServiceConfig, serve

    serve(
        ServiceConfig(
            store_dir=Path(store_dir),
            host=host,
            port=port,
            mock=mock,
            seed=seed,
            cors_origins=cors_origins or ("*",),
            glossary_path=Path(glossary_path) if glossary_path else None,
        )
    )


if __name__ == "__main__":
    main()
