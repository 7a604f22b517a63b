import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gesturebot.raster import BinFrame


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_bin(rng, h, w, p=0.5) -> BinFrame:
    return BinFrame((rng.random((h, w)) < p).astype(np.uint8))
