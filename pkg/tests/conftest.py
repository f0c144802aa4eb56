import pathlib
import sys

try:
    import nullgauge  # noqa: F401
except ImportError:  # running from a checkout without installation
    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

import pytest

from nullgauge.fuzz import FuzzConfig


@pytest.fixture
def quick_cfg():
    """Smaller sample count for unit tests; acceptance uses the defaults."""
    return FuzzConfig(samples=300, seed=7)
