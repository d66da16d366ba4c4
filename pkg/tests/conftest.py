from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import write_history_corpus, write_summary_corpus  # noqa: E402

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def history_versions(tmp_path_factory) -> list[Path]:
    root = tmp_path_factory.mktemp("history-corpus")
    return write_history_corpus(root)


@pytest.fixture(scope="session")
def summary_versions(tmp_path_factory) -> list[Path]:
    root = tmp_path_factory.mktemp("summary-corpus")
    return write_summary_corpus(root)


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN_DIR
