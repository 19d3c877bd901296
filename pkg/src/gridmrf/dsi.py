"""Cost-volume construction from image pairs and triplets, the mean-cost
penalty estimate, and the gradient-adaptive edge weights.
"""

from dataclasses import dataclass

import numpy as np

from .model import CostVolume, EdgeWeights, LabelSpace, PixelGrid


@dataclass(frozen=True)
class MatchConfig:
    """How matching costs are computed: exponent l2, label space, truncation
    at cmax (default 100^l2, also the out-of-bounds cost), triplet mode."""

    l2: int
    space: LabelSpace
    composite: bool = False
    cmax: int | None = None

    def __post_init__(self):
        if self.l2 not in (1, 2):
            raise ValueError("cost exponent l2 must be 1 or 2")
        if self.cmax is None:
            object.__setattr__(self, "cmax", 100 ** self.l2)
        if self.cmax <= 0:
            raise ValueError("cmax must be positive")


def _label_cost(ref, target, vx, vy, l2, cmax):
    """(H, W) cost plane for one offset; out-of-image samples cost cmax."""
    h, w = ref.shape[:2]
    out = np.full((h, w), cmax, dtype=np.int64)
    x0, x1 = max(0, -vx), min(w, w - vx)
    y0, y1 = max(0, -vy), min(h, h - vy)
    if x0 >= x1 or y0 >= y1:
        return out
    d = target[y0 + vy:y1 + vy, x0 + vx:x1 + vx] - ref[y0:y1, x0:x1]
    sq = (d * d).sum(axis=2)
    if l2 == 2:
        cost = sq
    else:
        # Euclidean norm is irrational for color; round to nearest unit
        cost = np.rint(np.sqrt(sq)).astype(np.int64)
    out[y0:y1, x0:x1] = np.minimum(cost, cmax)
    return out


def _check_pair(ref, target):
    if (ref.height, ref.width, ref.channels) != (target.height, target.width, target.channels):
        raise ValueError("images must share size and channel count")


def build_cost_volume(ref, target, cfg):
    """C(x,v) = min(||target(x+v) - ref(x)||^l2, cmax), cmax when x+v leaves
    the image.  Stereo offsets shift along x; motion offsets shift x and y."""
    _check_pair(ref, target)
    offs = cfg.space.offsets
    costs = np.empty((ref.height, ref.width, cfg.space.count), dtype=np.int64)
    for i in range(cfg.space.count):
        vx = int(offs[i, 0])
        vy = int(offs[i, 1]) if cfg.space.dims == 2 else 0
        costs[:, :, i] = _label_cost(ref.samples, target.samples, vx, vy, cfg.l2, cfg.cmax)
    return CostVolume(costs, cfg.space, cfg.cmax)


def build_composite_cost(middle, plus_view, minus_view, cfg):
    """Occlusion-tolerant triplet cost: C(x,v) = min of matching plus_view at
    +v and minus_view at -v.  For stereo the +v view is the left camera; for
    motion it is the next frame."""
    _check_pair(middle, plus_view)
    _check_pair(middle, minus_view)
    offs = cfg.space.offsets
    costs = np.empty((middle.height, middle.width, cfg.space.count), dtype=np.int64)
    for i in range(cfg.space.count):
        vx = int(offs[i, 0])
        vy = int(offs[i, 1]) if cfg.space.dims == 2 else 0
        fwd = _label_cost(middle.samples, plus_view.samples, vx, vy, cfg.l2, cfg.cmax)
        bwd = _label_cost(middle.samples, minus_view.samples, -vx, -vy, cfg.l2, cfg.cmax)
        costs[:, :, i] = np.minimum(fwd, bwd)
    return CostVolume(costs, cfg.space, cfg.cmax)


def estimate_lambda(volume, l1, l2, g):
    """lam = floor(l2 * <C> / (l1 * g^l1)) with <C> the mean over all N*Q
    entries, evaluated exactly in integers."""
    if g < 1:
        raise ValueError("truncation threshold g must be >= 1")
    total = int(volume.costs.sum())
    return (l2 * total) // (l1 * g ** l1 * volume.costs.size)


def build_edge_weights(ref, threshold=10):
    """w = 2 on edges whose luminance step is below the threshold (penalize
    jumps harder inside smooth regions), w = 1 across intensity edges."""
    lum = ref.luminance()
    wx = np.where(np.abs(lum[:, 1:] - lum[:, :-1]) < threshold, 2, 1).astype(np.int64)
    wy = np.where(np.abs(lum[1:, :] - lum[:-1, :]) < threshold, 2, 1).astype(np.int64)
    return EdgeWeights(wx, wy)
