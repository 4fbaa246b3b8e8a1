from pathlib import Path
import sys

import pytest

# Ensure project root is on sys.path so `import drht` works
PROJECT_ROOT = Path(__file__).resolve().parents[2]
project_root_str = str(PROJECT_ROOT)
if project_root_str not in sys.path:
    sys.path.insert(0, project_root_str)

from drht.lipschitz_maps import constant, identity  # noqa: E402
from drht.metric_space import cycle, interval  # noqa: E402


@pytest.fixture
def hexagon():
    """Six points on a circle with the hop metric."""
    return cycle(6)


@pytest.fixture
def hexagon_maps(hexagon):
    """Identity and the constant map at point 0 on the hexagon."""
    return identity(hexagon), constant(hexagon, hexagon, 0)


@pytest.fixture
def segment():
    return interval(3)
