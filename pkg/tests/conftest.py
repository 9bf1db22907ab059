from __future__ import annotations

from pathlib import Path

import pytest

from cpdkit.gateway import MockChatBackend
from cpdkit.glossary import load_glossary
from cpdkit.model import Diagram
from cpdkit.serialize import deserialize

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = REPO_ROOT / "fixtures"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

VALID_FIXTURES = (
    "fig1",
    "missing_required",
    "disconnected",
    "wrong_order",
    "wrong_endpoints",
    "empty",
)


def fixture_path(name: str) -> Path:
    return FIXTURES_DIR / f"{name}.cpd.json"


def load_fixture(name: str) -> Diagram:
    return deserialize(fixture_path(name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fig1() -> Diagram:
    return load_fixture("fig1")


@pytest.fixture(scope="session")
def glossary():
    return load_glossary()


@pytest.fixture()
def mock_backend() -> MockChatBackend:
    return MockChatBackend(seed=42)
