"""Brute-force references the fast engines are validated against.

Every function here re-derives its answer from first principles — exhaustive
candidate scans, exhaustive path/field enumeration, or a literal step-by-step
interpretation of the multi-direction update — sharing only plain data
containers with the engine modules, never their arithmetic.

The seeded suites double as the source of the committed golden files.
"""

import itertools
from dataclasses import dataclass

import numpy as np
from numba import njit

from .edp import DirectionSums
from .model import CostVolume, EdgeWeights, SmoothnessModel, stereo_labels
from .scanline import ScanlineProblem

CHAIN_STATE_LIMIT = 10 ** 6
GRID_STATE_LIMIT = 5 * 10 ** 7


def _penalty(offs_a, offs_b, l1, g, lam, w):
    f = 0
    for a, b in zip(offs_a, offs_b):
        f += abs(a - b) ** l1
    return w * lam * min(f, g ** l1)


def oracle_minplus(s, space, model, w=1):
    """Exhaustive Q^2 min-plus transform; ground truth for the operators."""
    offs = [space.multi(i) for i in range(space.count)]
    out = np.empty(space.count, dtype=np.int64)
    for vp in range(space.count):
        best = None
        for v in range(space.count):
            c = int(s[v]) + _penalty(offs[vp], offs[v], model.l1, model.g, model.lam, w)
            if best is None or c < best:
                best = c
        out[vp] = best
    return out


def chain_energy(problem, path):
    """Energy of one explicit chain labeling, summed term by term."""
    model = problem.model
    space = problem.space
    wline = problem.edge_weights()
    e = 0
    for x, v in enumerate(path):
        e += int(problem.costs[x, v])
    for x in range(len(path) - 1):
        e += _penalty(space.multi(path[x]), space.multi(path[x + 1]),
                      model.l1, model.g, model.lam, int(wline[x]))
    return e


def oracle_chain(problem):
    """(global minimum, all optimal paths) by enumerating every labeling."""
    q = problem.space.count
    length = problem.length
    if q ** length > CHAIN_STATE_LIMIT:
        raise ValueError(f"{q}^{length} states exceed the enumeration limit")
    best = None
    paths = []
    for path in itertools.product(range(q), repeat=length):
        e = chain_energy(problem, path)
        if best is None or e < best:
            best = e
            paths = [path]
        elif e == best:
            paths.append(path)
    return best, paths


@dataclass(frozen=True)
class TinyInstance:
    """A grid small enough to enumerate exhaustively."""

    volume: CostVolume
    model: SmoothnessModel
    seed: int

    def states(self):
        return self.volume.space.count ** self.volume.pixel_count


@njit(cache=True)
def _enum_grid(costs, pen, wx, wy, h, w):
    # odometer over all label fields with incremental energy updates; digit 0
    # (pixel (0,0)) turns fastest, ties keep the first field reached
    n = h * w
    q = costs.shape[1]
    labels = np.zeros(n, dtype=np.int64)
    e = np.int64(0)
    for p in range(n):
        e += costs[p, 0]
    best = e
    best_labels = labels.copy()
    total = np.int64(1)
    for _ in range(n):
        total *= q
    count = np.int64(1)
    while count < total:
        p = 0
        while True:
            old = labels[p]
            new = old + 1
            if new == q:
                new = 0
            y = p // w
            x = p % w
            d = costs[p, new] - costs[p, old]
            if x > 0:
                d += wx[y, x - 1] * (pen[new, labels[p - 1]] - pen[old, labels[p - 1]])
            if x < w - 1:
                d += wx[y, x] * (pen[new, labels[p + 1]] - pen[old, labels[p + 1]])
            if y > 0:
                d += wy[y - 1, x] * (pen[new, labels[p - w]] - pen[old, labels[p - w]])
            if y < h - 1:
                d += wy[y, x] * (pen[new, labels[p + w]] - pen[old, labels[p + w]])
            e += d
            labels[p] = new
            if new != 0:
                break
            p += 1
        count += 1
        if e < best:
            best = e
            best_labels = labels.copy()
    return best, best_labels


def oracle_grid(instance):
    """(global minimum, one optimal field) by enumerating every field."""
    if instance.states() > GRID_STATE_LIMIT:
        raise ValueError("state space exceeds the enumeration limit")
    volume, model = instance.volume, instance.model
    space = volume.space
    q = space.count
    offs = [space.multi(i) for i in range(q)]
    pen = np.empty((q, q), dtype=np.int64)
    for a in range(q):
        for b in range(q):
            pen[a, b] = _penalty(offs[a], offs[b], model.l1, model.g, model.lam, 1)
    if model.weights is not None:
        wx, wy = model.weights.wx, model.weights.wy
    else:
        wx = np.ones((volume.height, volume.width - 1), dtype=np.int64)
        wy = np.ones((volume.height - 1, volume.width), dtype=np.int64)
    costs = np.ascontiguousarray(
        volume.costs.reshape(volume.pixel_count, q), dtype=np.int64
    )
    best, labels = _enum_grid(costs, pen, wx, wy, volume.height, volume.width)
    return int(best), labels.reshape(volume.height, volume.width)


_OPPOSITE = {0: 1, 1: 0, 2: 3, 3: 2}
_NEIGHBOR = {0: (0, -1), 1: (0, 1), 2: (-1, 0), 3: (1, 0)}  # dy, dx of source


def oracle_edp_step(sums, volume, model, order):
    """Literal, allocation-heavy interpretation of one multi-direction pass;
    must agree bit-exactly with edp_pass given the same conventions."""
    data = [[[list(sums.data[k, y, x]) for x in range(volume.width)]
             for y in range(volume.height)] for k in range(4)]
    space = volume.space
    q = space.count
    if model.weights is not None:
        wx, wy = model.weights.wx, model.weights.wy
    else:
        wx = np.ones((volume.height, volume.width - 1), dtype=np.int64)
        wy = np.ones((volume.height - 1, volume.width), dtype=np.int64)

    ys = range(volume.height) if order.inc_y else range(volume.height - 1, -1, -1)
    xs = list(range(volume.width)) if order.inc_x else list(range(volume.width - 1, -1, -1))
    for y in ys:
        for x in xs:
            msgs = []
            for k in range(4):
                dy, dx = _NEIGHBOR[k]
                ny, nx = y + dy, x + dx
                if not (0 <= ny < volume.height and 0 <= nx < volume.width):
                    msgs.append([0] * q)
                    continue
                if k == 0:
                    ew = int(wx[y, x - 1])
                elif k == 1:
                    ew = int(wx[y, x])
                elif k == 2:
                    ew = int(wy[y - 1, x])
                else:
                    ew = int(wy[y, x])
                halved = [v // 2 for v in data[k][ny][nx]]
                msgs.append(list(oracle_minplus(halved, space, model, ew)))
            for t in order.dirs:
                o = _OPPOSITE[t]
                row = []
                for v in range(q):
                    row.append(int(volume.costs[y, x, v])
                               + msgs[0][v] + msgs[1][v] + msgs[2][v] + msgs[3][v]
                               - 2 * msgs[o][v])
                data[t][y][x] = row
    out = np.array(data, dtype=np.int64)
    return DirectionSums(out, sums.iteration)


def tiny_suite(count=20):
    """The committed 4x4, Q=3 instances (seeds 1000..1000+count-1)."""
    out = []
    for i in range(count):
        seed = 1000 + i
        rng = np.random.default_rng(seed)
        costs = rng.integers(0, 41, size=(4, 4, 3)).astype(np.int64)
        l1 = 1 + i % 2
        g = 1 + (i // 2) % 2
        lam = int(rng.integers(1, 13))
        weights = None
        if i >= 10:
            weights = EdgeWeights(
                rng.integers(1, 3, size=(4, 3)).astype(np.int64),
                rng.integers(1, 3, size=(3, 4)).astype(np.int64),
            )
        model = SmoothnessModel(l1=l1, g=g, lam=lam, weights=weights)
        volume = CostVolume(costs, stereo_labels(2), cmax=40)
        out.append(TinyInstance(volume, model, seed))
    return out


def chain_suite(count=200):
    """Seeded chains (length <= 8, Q <= 5) for the 1D exactness suite."""
    out = []
    for i in range(count):
        seed = 2000 + i
        rng = np.random.default_rng(seed)
        length = int(rng.integers(1, 9))
        q = int(rng.integers(2, 6))
        costs = rng.integers(0, 31, size=(length, q)).astype(np.int64)
        l1 = 1 + i % 2
        g = int(rng.integers(1, 4))
        lam = int(rng.integers(0, 7))
        weights = None
        if i % 2 == 1 and length > 1:
            weights = rng.integers(1, 3, size=length - 1).astype(np.int64)
        model = SmoothnessModel(l1=l1, g=g, lam=lam)
        out.append((ScanlineProblem(costs, stereo_labels(q - 1), model, weights), seed))
    return out
