from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from cpdkit.cli import main
from cpdkit.gateway import MockChatBackend
from cpdkit.model import ElementKind
from cpdkit.recommend import SuggestionMode, SuggestionRequest, suggest
from cpdkit.serialize import deserialize
from cpdkit.validate import NO_ISSUES_MESSAGE, check

from .conftest import fixture_path

K = ElementKind


@pytest.fixture()
def runner():
    return CliRunner()


class TestCheckCommand:
    def test_clean_diagram_exits_zero_with_the_confirmation(self, runner):
        result = runner.invoke(main, ["check", str(fixture_path("fig1"))])
        assert result.exit_code == 0
        assert result.output.strip() == NO_ISSUES_MESSAGE

    def test_empty_diagram_lists_all_five_missing_kinds(self, runner):
        result = runner.invoke(main, ["check", str(fixture_path("empty"))])
        assert result.exit_code == 1
        for name in (
            "strategy",
            "mechanism",
            "barrier",
            "proximal outcome",
            "distal outcome",
        ):
            assert f"- {name}" in result.output

    def test_malformed_file_exits_two(self, runner):
        path = fixture_path("fig1").parent / "malformed" / "unknown_kind.cpd.json"
        result = runner.invoke(main, ["check", str(path)])
        assert result.exit_code == 2
        assert "unknown element kind" in result.output

    def test_missing_file_exits_two(self, runner, tmp_path):
        result = runner.invoke(main, ["check", str(tmp_path / "nope.cpd.json")])
        assert result.exit_code == 2

    def test_json_format_emits_the_diagnostics_array(self, runner):
        result = runner.invoke(
            main, ["check", str(fixture_path("wrong_order")), "--format", "json"]
        )
        assert result.exit_code == 1
        diagnostics = json.loads(result.output)
        assert diagnostics[0]["code"] == "invalid_order"
        assert diagnostics[0]["subjects"] == ["cn-bad-order"]


class TestExportCommand:
    def test_dot_to_stdout(self, runner):
        result = runner.invoke(
            main, ["export", str(fixture_path("fig1")), "--format", "dot"]
        )
        assert result.exit_code == 0
        assert "shape=octagon" in result.output

    def test_svg_to_file(self, runner, tmp_path):
        out = tmp_path / "fig1.svg"
        result = runner.invoke(
            main,
            ["export", str(fixture_path("fig1")), "--format", "svg", "-o", str(out)],
        )
        assert result.exit_code == 0
        assert out.read_text(encoding="utf-8").startswith("<?xml")

    def test_malformed_input_exits_two(self, runner):
        path = fixture_path("fig1").parent / "malformed" / "not_json.cpd.json"
        result = runner.invoke(main, ["export", str(path), "--format", "dot"])
        assert result.exit_code == 2


class TestBrainstormCommand:
    def test_mock_brainstorm_is_deterministic(self, runner):
        args = [
            "brainstorm",
            "--kind",
            "mechanism",
            "--before",
            "strategy:Run ad campaign",
            "--after",
            "barrier:Concerns about inconsistent schedule",
            "--mock",
            "--seed",
            "42",
        ]
        result = runner.invoke(main, args)
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        expected = suggest(
            SuggestionRequest(
                mode=SuggestionMode.BRAINSTORM,
                target_kind=K.MECHANISM,
                context=(
                    (K.STRATEGY, "Run ad campaign"),
                    (K.BARRIER, "Concerns about inconsistent schedule"),
                ),
            ),
            MockChatBackend(seed=42),
        )
        assert lines == list(expected.candidates)
        assert 1 <= len(lines) <= 5
        # Same invocation, same candidates.
        assert runner.invoke(main, args).output == result.output

    def test_requires_some_context(self, runner):
        result = runner.invoke(main, ["brainstorm", "--kind", "mechanism", "--mock"])
        assert result.exit_code == 2

    def test_unknown_kind_is_a_usage_error(self, runner):
        result = runner.invoke(
            main, ["brainstorm", "--kind", "mechansim", "--before", "strategy:x", "--mock"]
        )
        assert result.exit_code == 2

    def test_gateway_failure_exits_three(self, runner, monkeypatch):
        monkeypatch.delenv("CPD_LLM_API_KEY", raising=False)
        result = runner.invoke(
            main, ["brainstorm", "--kind", "mechanism", "--before", "strategy:x"]
        )
        assert result.exit_code == 3


class TestWizardCommand:
    def test_scripted_run_with_mock_suggestions(self, runner, tmp_path):
        out = tmp_path / "pathway.cpd.json"
        result = runner.invoke(
            main,
            ["wizard", "--mock", "--seed", "42", "-o", str(out)],
            input="1\n2\n1\n1\n3\n",
        )
        assert result.exit_code == 0, result.output
        diagram = deserialize(out.read_text(encoding="utf-8"))
        assert len(diagram.elements) == 5
        assert check(diagram) == []
        assert NO_ISSUES_MESSAGE in result.output

    def test_typed_answers_without_suggestions(self, runner, tmp_path):
        out = tmp_path / "typed.cpd.json"
        answers = "\n".join(
            [
                "Increased physical activity",
                "Concerns about not being able to walk up all the stairs",
                "Clients take the stairs instead of the elevators",
                "Display poster with positive messaging",
                "Increase self-efficacy",
            ]
        )
        result = runner.invoke(
            main,
            ["wizard", "--no-suggest", "-o", str(out)],
            input=answers + "\n",
        )
        assert result.exit_code == 0, result.output
        diagram = deserialize(out.read_text(encoding="utf-8"))
        labels = [e.label for e in diagram.elements]
        assert labels[0] == "Display poster with positive messaging"
        assert labels[-1] == "Increased physical activity"

    def test_blank_answer_reprompts(self, runner, tmp_path):
        out = tmp_path / "reprompt.cpd.json"
        result = runner.invoke(
            main,
            ["wizard", "--no-suggest", "-o", str(out)],
            input="\n".join(["   ", "distal", "barrier", "proximal", "strategy", "mechanism"]) + "\n",
        )
        assert result.exit_code == 0, result.output
        assert "Please enter some content." in result.output

    def test_session_persisted_to_store(self, runner, tmp_path):
        out = tmp_path / "stored.cpd.json"
        store_dir = tmp_path / "store"
        result = runner.invoke(
            main,
            ["wizard", "--mock", "--store", str(store_dir), "-o", str(out)],
            input="1\n1\n1\n1\n1\n",
        )
        assert result.exit_code == 0, result.output
        from cpdkit.store import Store

        store = Store(store_dir)
        assert len(store.list_session_ids()) == 1
        assert len(store.list_diagram_ids()) == 1
        session = store.load_session(store.list_session_ids()[0])
        assert session.done


class TestServeCommand:
    def test_unwritable_store_fails_fast(self, runner, tmp_path):
        blocker = tmp_path / "not-a-dir"
        blocker.write_text("file in the way", encoding="utf-8")
        result = runner.invoke(
            main, ["serve", "--store", str(blocker), "--port", "0"]
        )
        assert result.exit_code != 0
