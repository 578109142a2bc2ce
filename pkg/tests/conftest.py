import sys
from pathlib import Path

import pytest

from pdl.bench import CORPUS_DIR
from pdl.parser import parse_kb

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def corpus():
    """Load a shipped corpus theory by its file stem, e.g. ``01_basic``."""
    def load(stem: str):
        return parse_kb((CORPUS_DIR / f"{stem}.bdl").read_text())
    return load
