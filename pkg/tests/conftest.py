"""Shared synthetic scenes.

Stereo pairs are cut from one wider random strip so the true offset between
the views is a known constant everywhere; motion frames shift along both
axes the same way.
"""

import numpy as np
import pytest

from gridmrf.model import PixelGrid


@pytest.fixture
def stereo_pair():
    """Factory for (right, left, disp): left(x + disp) == right(x)."""

    def make(seed=0, height=10, width=18, disp=2, channels=3):
        rng = np.random.default_rng(seed)
        strip = rng.integers(0, 256, size=(height, width + disp, channels))
        left = PixelGrid(strip[:, :width])
        right = PixelGrid(strip[:, disp:disp + width])
        return right, left, disp

    return make


@pytest.fixture
def motion_pair():
    """Factory for (ref, nxt, (vx, vy)): nxt(x+vx, y+vy) == ref(x, y)."""

    def make(seed=0, height=12, width=16, vx=1, vy=1, channels=3):
        rng = np.random.default_rng(seed)
        canvas = rng.integers(0, 256, size=(height + vy, width + vx, channels))
        nxt = PixelGrid(canvas[:height, :width])
        ref = PixelGrid(canvas[vy:vy + height, vx:vx + width])
        return ref, nxt, (vx, vy)

    return make
