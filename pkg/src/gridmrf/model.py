"""Core data model: pixel grids, label spaces, cost volumes, smoothness
models, and the exact integer energy evaluator shared by all solvers.

All energies are fixed-point integers carried in int64; evaluation never
rounds, so equal inputs give bit-equal energies everywhere.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

# Saturation sentinel for the fixed-point engines: additions clamp here
# instead of wrapping.  Penalty scales are validated to stay strictly below
# it so INF + one increment can never overflow int64.
INF = np.int64(2) ** 62


@dataclass(frozen=True)
class LabelSpace:
    """R-dimensional box of candidate offsets (R=1 stereo, R=2 motion).

    Linear indexing runs dimension 1 fastest: for a 2D box the label with
    per-dimension coordinates (c1, c2) has index c2 * n1 + c1.
    """

    lows: tuple
    highs: tuple

    def __post_init__(self):
        if len(self.lows) != len(self.highs) or not self.lows:
            raise ValueError("lows/highs must be nonempty and equal length")
        if len(self.lows) > 2:
            raise ValueError("only 1D and 2D label spaces are supported")
        for lo, hi in zip(self.lows, self.highs):
            if hi < lo:
                raise ValueError(f"empty label range [{lo}, {hi}]")

    @property
    def dims(self):
        return len(self.lows)

    @property
    def sizes(self):
        return tuple(hi - lo + 1 for lo, hi in zip(self.lows, self.highs))

    @property
    def count(self):
        n = 1
        for s in self.sizes:
            n *= s
        return n

    @cached_property
    def offsets(self):
        """(Q, R) int64 array mapping linear index -> per-dimension offsets."""
        grids = np.meshgrid(
            *[np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in zip(self.lows, self.highs)],
            indexing="ij",
        )
        # dimension 1 must vary fastest in the linear order
        cols = [g.transpose().reshape(-1) for g in grids]
        out = np.stack(cols, axis=1)
        out.setflags(write=False)
        return out

    def index(self, multi):
        """Linear index of a per-dimension offset tuple."""
        multi = tuple(multi)
        if len(multi) != self.dims:
            raise ValueError(f"expected {self.dims} offsets, got {len(multi)}")
        idx = 0
        stride = 1
        for m, lo, hi in zip(multi, self.lows, self.highs):
            if not lo <= m <= hi:
                raise ValueError(f"offset {m} outside [{lo}, {hi}]")
            idx += (m - lo) * stride
            stride *= hi - lo + 1
        return idx

    def multi(self, index):
        """Inverse of index(): per-dimension offsets of a linear index."""
        if not 0 <= index < self.count:
            raise ValueError(f"label index {index} outside [0, {self.count})")
        out = []
        for lo, hi in zip(self.lows, self.highs):
            n = hi - lo + 1
            out.append(lo + index % n)
            index //= n
        return tuple(out)

    def negated(self):
        """The mirrored box holding -v for every v in this box."""
        return LabelSpace(
            tuple(-h for h in self.highs), tuple(-l for l in self.lows)
        )


def stereo_labels(max_disp):
    return LabelSpace((0,), (max_disp,))


def motion_labels(max_vx, max_vy):
    return LabelSpace((-max_vx, -max_vy), (max_vx, max_vy))


class PixelGrid:
    """Grayscale or RGB image with integer samples in [0, 255]."""

    def __init__(self, samples):
        samples = np.asarray(samples)
        if samples.ndim == 2:
            samples = samples[:, :, None]
        if samples.ndim != 3 or samples.shape[2] not in (1, 3):
            raise ValueError("samples must be HxW or HxWx{1,3}")
        if samples.shape[0] < 1 or samples.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if samples.min() < 0 or samples.max() > 255:
            raise ValueError("samples must lie in [0, 255]")
        self.samples = samples.astype(np.int64)
        self.samples.setflags(write=False)

    @property
    def height(self):
        return self.samples.shape[0]

    @property
    def width(self):
        return self.samples.shape[1]

    @property
    def channels(self):
        return self.samples.shape[2]

    def luminance(self):
        """Grayscale plane: rounded channel mean (exact for 1-channel)."""
        if self.channels == 1:
            return self.samples[:, :, 0].copy()
        # x/3 never lands on .5, so round-to-nearest has no tie ambiguity
        return np.rint(self.samples.mean(axis=2)).astype(np.int64)


class CostVolume:
    """Per-pixel, per-label matching costs C(x, v) as int64, bounded by cmax."""

    def __init__(self, costs, space, cmax):
        costs = np.asarray(costs, dtype=np.int64)
        if costs.ndim != 3:
            raise ValueError("costs must be (height, width, labels)")
        if costs.shape[2] != space.count:
            raise ValueError(
                f"label axis {costs.shape[2]} does not match space count {space.count}"
            )
        if costs.min() < 0 or costs.max() > cmax:
            raise ValueError(f"costs must lie in [0, {cmax}]")
        self.costs = costs
        self.costs.setflags(write=False)
        self.space = space
        self.cmax = int(cmax)

    @property
    def height(self):
        return self.costs.shape[0]

    @property
    def width(self):
        return self.costs.shape[1]

    @property
    def pixel_count(self):
        return self.height * self.width

    def mean_cost(self):
        """Exact arithmetic mean over all N*Q entries."""
        return Fraction(int(self.costs.sum()), self.costs.size)


@dataclass(frozen=True, eq=False)
class EdgeWeights:
    """Per-edge multipliers in {1, 2}: wx[y, x] weights edge (y,x)-(y,x+1),
    wy[y, x] weights edge (y,x)-(y+1,x)."""

    wx: np.ndarray
    wy: np.ndarray

    def __post_init__(self):
        for name, w in (("wx", self.wx), ("wy", self.wy)):
            if w.size and (w.min() < 1 or w.max() > 2):
                raise ValueError(f"{name} entries must be 1 or 2")
            w.setflags(write=False)

    @staticmethod
    def uniform(height, width):
        return EdgeWeights(
            np.ones((height, max(width - 1, 0)), dtype=np.int64),
            np.ones((max(height - 1, 0), width), dtype=np.int64),
        )


@dataclass(frozen=True)
class SmoothnessModel:
    """Truncated pairwise prior: edge penalty w * lam * min(sum_r |u_r|^l1, g^l1)."""

    l1: int
    g: int
    lam: int
    weights: EdgeWeights | None = None

    def __post_init__(self):
        if self.l1 not in (1, 2):
            raise ValueError("prior exponent l1 must be 1 or 2")
        if self.g < 1:
            raise ValueError("truncation threshold g must be >= 1")
        if self.lam < 0:
            raise ValueError("penalty lam must be >= 0")
        if self.lam * self.g ** self.l1 >= int(INF):
            raise ValueError("penalty scale lam*g^l1 must stay below 2**62")

    @property
    def fg(self):
        """Truncation value f(g) = g^l1."""
        return self.g ** self.l1

    def scaled(self, factor):
        return SmoothnessModel(self.l1, self.g, self.lam * factor, self.weights)


@dataclass(frozen=True, eq=False)
class DisparityField:
    """Per-pixel selected label (linear indices into a LabelSpace)."""

    labels: np.ndarray

    def __post_init__(self):
        if self.labels.ndim != 2:
            raise ValueError("labels must be (height, width)")
        self.labels.setflags(write=False)

    def validate(self, space):
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= space.count):
            raise ValueError("label index outside [0, Q)")


@dataclass(frozen=True)
class EnergyBreakdown:
    total: int
    data: int
    smooth: int
    per_pixel: Fraction

    def __post_init__(self):
        assert self.total == self.data + self.smooth


def evaluate_energy(volume, model, fld):
    """Exact total energy of a labeling: data term plus truncated smoothness
    over the 4-neighborhood, each unordered grid edge counted once.
    """
    labels = fld.labels
    if labels.shape != (volume.height, volume.width):
        raise ValueError(
            f"field shape {labels.shape} does not match volume "
            f"{(volume.height, volume.width)}"
        )
    fld.validate(volume.space)

    data = int(
        np.take_along_axis(volume.costs, labels[:, :, None], axis=2).sum()
    )

    offs = volume.space.offsets  # (Q, R)
    fg = model.fg
    weights = model.weights
    smooth = 0
    for axis in (0, 1):  # 0: x edges, 1: y edges
        if axis == 0:
            a, b = labels[:, :-1], labels[:, 1:]
            w = weights.wx if weights is not None else 1
        else:
            a, b = labels[:-1, :], labels[1:, :]
            w = weights.wy if weights is not None else 1
        if a.size == 0:
            continue
        du = np.abs(offs[b] - offs[a])  # (..., R)
        f = (du ** model.l1).sum(axis=-1)
        pen = w * model.lam * np.minimum(f, fg)
        smooth += int(pen.sum())

    total = data + smooth
    n = volume.pixel_count
    return EnergyBreakdown(total, data, smooth, Fraction(total, n))
