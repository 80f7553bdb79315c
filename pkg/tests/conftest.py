import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from tangentcert.construct import run_stages


@pytest.fixture(scope="session")
def stage4():
    """Shared four-stage construction at the default depth."""
    return run_stages(4)
