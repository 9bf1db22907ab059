from __future__ import annotations

import json
import random

import pytest

from cpdkit.serialize import (
    DiagramParseError,
    DiagramSchemaError,
    deserialize,
    serialize,
)

from .conftest import FIXTURES_DIR, fixture_path, load_fixture
from .oracles import random_diagram

# Expected failure mode per malformed corpus entry.
MALFORMED_EXPECTATIONS = {
    "not_json": (DiagramParseError, None),
    "truncated": (DiagramParseError, None),
    "unknown_kind": (DiagramSchemaError, "elements[0].kind"),
    "dangling_source": (DiagramSchemaError, "connections[0].source"),
    "dangling_target": (DiagramSchemaError, "connections[0].target"),
    "self_loop": (DiagramSchemaError, "connections[0].target"),
    "duplicate_element_id": (DiagramSchemaError, "elements[1].id"),
    "unknown_element_field": (DiagramSchemaError, "elements[0].color"),
    "unknown_connection_field": (DiagramSchemaError, "connections[0].weight"),
    "missing_title": (DiagramSchemaError, "title"),
    "bad_target_type": (DiagramSchemaError, "connections[0].target_type"),
    "causal_targets_connection": (DiagramSchemaError, "connections[1].target_type"),
    "bad_position": (DiagramSchemaError, "elements[0].position.y"),
    "bad_timestamp": (DiagramSchemaError, "created"),
}


def test_fig1_round_trips_byte_identically():
    text = fixture_path("fig1").read_text(encoding="utf-8")
    diagram = deserialize(text)
    assert serialize(diagram) == text
    assert deserialize(serialize(diagram)) == diagram


def test_unknown_kind_names_the_field():
    obj = json.loads(fixture_path("fig1").read_text(encoding="utf-8"))
    obj["elements"][1]["kind"] = "mechansim"
    with pytest.raises(DiagramSchemaError) as excinfo:
        deserialize(json.dumps(obj))
    assert excinfo.value.field == "elements[1].kind"
    assert "mechansim" in str(excinfo.value)


def test_parse_error_carries_position():
    with pytest.raises(DiagramParseError) as excinfo:
        deserialize('{"id": "x", "title": ')
    assert excinfo.value.line == 1
    assert excinfo.value.column > 1


@pytest.mark.parametrize("name", sorted(MALFORMED_EXPECTATIONS))
def test_malformed_corpus(name):
    expected_class, expected_field = MALFORMED_EXPECTATIONS[name]
    text = (FIXTURES_DIR / "malformed" / f"{name}.cpd.json").read_text("utf-8")
    with pytest.raises(expected_class) as excinfo:
        deserialize(text)
    if expected_field is not None:
        assert excinfo.value.field == expected_field


def test_unknown_top_level_fields_survive_round_trip():
    obj = json.loads(fixture_path("fig1").read_text(encoding="utf-8"))
    obj["board_theme"] = {"palette": "warm"}
    obj["revision"] = 7
    diagram = deserialize(json.dumps(obj))
    assert diagram.extras == {"board_theme": {"palette": "warm"}, "revision": 7}
    again = deserialize(serialize(diagram))
    assert again == diagram
    assert json.loads(serialize(diagram))["board_theme"] == {"palette": "warm"}


def test_note_and_position_are_optional():
    diagram = load_fixture("empty")
    assert serialize(diagram)
    obj = json.loads(serialize(diagram))
    assert obj["elements"] == []


def test_random_diagrams_round_trip():
    rng = random.Random(1234)
    for _ in range(150):
        diagram = random_diagram(rng)
        assert deserialize(serialize(diagram)) == diagram


def test_no_partially_valid_diagram_is_returned():
    # The dangling connection comes after a valid prefix; nothing leaks out.
    obj = json.loads(fixture_path("fig1").read_text(encoding="utf-8"))
    obj["connections"].append(
        {
            "id": "cn-x",
            "source": "el-strategy",
            "target": "el-nowhere",
            "target_type": "element",
            "kind": "causal",
        }
    )
    with pytest.raises(DiagramSchemaError):
        deserialize(json.dumps(obj))
