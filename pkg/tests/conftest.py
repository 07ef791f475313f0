from typing import Callable

import random
from pathlib import Path

import pytest

SEED = 20211104


@pytest.fixture
def rng() -> random.Random:
    return random.Random(SEED)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    """Keep ZINC_BRIDGE_* settings of the developer's shell out of the tests."""
    for name in (
        "ZINC_BRIDGE_MZN2FZN_COMMAND",
        "ZINC_BRIDGE_FZN_SOLVER_COMMAND",
        "ZINC_BRIDGE_ORACLE_BUDGET",
        "ZINC_BRIDGE_LOG_LEVEL",
        "ZINC_BRIDGE_LOG_FORMAT",
    ):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def write(tmp_path: Path) -> Callable[[str, str], Path]:
    def write_file(name: str, text: str) -> Path:
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return path

    return write_file
