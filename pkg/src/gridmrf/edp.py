"""Iterated multi-direction DP on the full 2D grid.

Four direction sums S_k (k in {+x, -x, +y, -y}) live on the grid and are
updated in place under four raster scan orders; after each iteration the
per-pixel marginals S_omega = C + sum_k M(S_k/2) yield the labeling.

The update at a vertex, for each of the pass's two directions k':

    S_k'(x,v) = C(x,v) + sum_{k != -k'} M(S_k(x_k,v)/2) - M(S_-k'(x_-k',v)/2)

where x_k is the neighbor on the side opposite direction k, out-of-grid
messages are zero, and M carries the weight of the traversed edge.  Reads
always see the freshest stored values, so information propagates across the
whole grid within a single pass.

Halving uses floor division; solve() doubles costs and lam up front (the
fixed-point scale) so the first-level halving is exact.  Sums may go
negative — argmins are translation-invariant — and stay finite throughout.
"""

import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .minplus import (
    INF,
    OPERATOR_CODES,
    _dim_penalties,
    _message,
    check_edge_weight,
    grms_window,
    truncation_lut,
)
from .model import CostVolume, DisparityField, evaluate_energy

DIR_POS_X, DIR_NEG_X, DIR_POS_Y, DIR_NEG_Y = 0, 1, 2, 3


@dataclass(frozen=True)
class ScanOrder:
    """A raster traversal (+-x inner, +-y outer) and the two direction sums
    it refreshes, x-direction first."""

    name: str
    inc_x: bool
    inc_y: bool
    dirs: tuple

P1 = ScanOrder("P1", True, True, (DIR_POS_X, DIR_POS_Y))
P2 = ScanOrder("P2", False, True, (DIR_NEG_X, DIR_POS_Y))
P3 = ScanOrder("P3", True, False, (DIR_POS_X, DIR_NEG_Y))
P4 = ScanOrder("P4", False, False, (DIR_NEG_X, DIR_NEG_Y))

SCAN_ORDERS = (P1, P2, P3, P4)


@dataclass(eq=False)
class DirectionSums:
    """The four S_k fields, shape (4, height, width, labels), plus the count
    of completed iterations.  Always finite.  `shifts` records, per slice,
    how far renormalization has pushed the stored values below the
    unnormalized run (all zeros when the flag is off)."""

    data: np.ndarray
    iteration: int = 0
    shifts: np.ndarray = None

    @staticmethod
    def zeros(height, width, labels):
        return DirectionSums(np.zeros((4, height, width, labels), dtype=np.int64),
                             0,
                             np.zeros((4, height, width), dtype=np.int64))


@dataclass(eq=False)
class EnergyTrace:
    """Per-iteration energy breakdowns and wall seconds."""

    entries: list = field(default_factory=list)
    seconds: list = field(default_factory=list)

    def __len__(self):
        return len(self.entries)


@njit(cache=True)
def _gather(sums, wx, wy, y, x, op, n1, n2, lam, fg, pen_lut, pend, win, m, half, tmp, aux):
    # fill m[k,:] with M(S_k(x_k)/2) for the four directions; zero when the
    # source neighbor is off the grid
    h = sums.shape[1]
    w_img = sums.shape[2]
    q = sums.shape[3]
    for k in range(4):
        if k == DIR_POS_X:
            ny, nx = y, x - 1
        elif k == DIR_NEG_X:
            ny, nx = y, x + 1
        elif k == DIR_POS_Y:
            ny, nx = y - 1, x
        else:
            ny, nx = y + 1, x
        if ny < 0 or ny >= h or nx < 0 or nx >= w_img:
            for v in range(q):
                m[k, v] = 0
            continue
        if k == DIR_POS_X:
            ew = wx[y, x - 1]
        elif k == DIR_NEG_X:
            ew = wx[y, x]
        elif k == DIR_POS_Y:
            ew = wy[y - 1, x]
        else:
            ew = wy[y, x]
        for v in range(q):
            half[v] = sums[k, ny, nx, v] // 2
        _message(half, ew, op, n1, n2, lam, fg, pen_lut, pend, win, m[k], tmp, aux)


@njit(cache=True)
def _pass_kernel(sums, shifts, costs, wx, wy, inc_x, inc_y, d1, d2, op, n1, n2,
                 lam, fg, pen_lut, pend, win, renorm):
    h, w_img, q = costs.shape
    m = np.empty((4, q), dtype=np.int64)
    half = np.empty(q, dtype=np.int64)
    tmp = np.empty(q, dtype=np.int64)
    aux = np.empty(q, dtype=np.int64)
    for yi in range(h):
        y = yi if inc_y else h - 1 - yi
        for xi in range(w_img):
            x = xi if inc_x else w_img - 1 - xi
            _gather(sums, wx, wy, y, x, op, n1, n2, lam, fg, pen_lut, pend, win, m, half, tmp, aux)
            for t in (d1, d2):
                o = t ^ 1  # opposite direction
                for v in range(q):
                    val = (costs[y, x, v] + m[0, v] + m[1, v] + m[2, v]
                           + m[3, v] - 2 * m[o, v])
                    if val > INF:
                        val = INF
                    sums[t, y, x, v] = val
                if renorm:
                    # The fresh slice already sits sum_k shifts_k//2 -
                    # shifts_o below the unnormalized run; pick the
                    # subtraction's parity so the slice's total offset stays
                    # even, else the next halving leaks a label-dependent
                    # unit and can flip near-tied argmins.
                    d = 0
                    for k in range(4):
                        if k == DIR_POS_X:
                            ny, nx = y, x - 1
                        elif k == DIR_NEG_X:
                            ny, nx = y, x + 1
                        elif k == DIR_POS_Y:
                            ny, nx = y - 1, x
                        else:
                            ny, nx = y + 1, x
                        if ny < 0 or ny >= h or nx < 0 or nx >= w_img:
                            continue
                        sk = shifts[k, ny, nx]
                        d += sk // 2
                        if k == o:
                            d -= sk
                    lo = sums[t, y, x, 0]
                    for v in range(1, q):
                        if sums[t, y, x, v] < lo:
                            lo = sums[t, y, x, v]
                    if (d + lo) % 2 != 0:
                        lo -= 1
                    for v in range(q):
                        sums[t, y, x, v] -= lo
                    shifts[t, y, x] = d + lo


@njit(cache=True)
def _marginals_kernel(sums, costs, wx, wy, op, n1, n2, lam, fg, pen_lut, pend, win, out):
    h, w_img, q = costs.shape
    m = np.empty((4, q), dtype=np.int64)
    half = np.empty(q, dtype=np.int64)
    tmp = np.empty(q, dtype=np.int64)
    aux = np.empty(q, dtype=np.int64)
    for y in range(h):
        for x in range(w_img):
            _gather(sums, wx, wy, y, x, op, n1, n2, lam, fg, pen_lut, pend, win, m, half, tmp, aux)
            for v in range(q):
                val = costs[y, x, v] + m[0, v] + m[1, v] + m[2, v] + m[3, v]
                if val > INF:
                    val = INF
                out[y, x, v] = val


def _kernel_args(volume, model, operator, window_scale):
    op = OPERATOR_CODES[operator]
    if op == OPERATOR_CODES["lrms"] and model.l1 != 1:
        raise ValueError("LRMS requires a truncated-linear prior (l1=1)")
    space = volume.space
    n1 = space.sizes[0]
    n2 = space.sizes[1] if space.dims == 2 else 1
    win = grms_window(model, window_scale)
    pen_lut = truncation_lut(space, model) if op == 0 else np.zeros((1, 1), dtype=np.int64)
    pend = _dim_penalties(model, win)
    if model.weights is not None:
        wx, wy = model.weights.wx, model.weights.wy
    else:
        wx = np.ones((volume.height, volume.width - 1), dtype=np.int64)
        wy = np.ones((volume.height - 1, volume.width), dtype=np.int64)
    wmax = 1
    if wx.size:
        wmax = max(wmax, int(wx.max()))
    if wy.size:
        wmax = max(wmax, int(wy.max()))
    check_edge_weight(wmax, model)
    return (np.int64(op), np.int64(n1), np.int64(n2), np.int64(model.lam),
            np.int64(model.fg), pen_lut, pend, np.int64(win)), wx, wy


def edp_pass(sums, volume, model, order, operator="sfms", window_scale=1.0,
             renormalize=False):
    """One scan of the grid in the given order, refreshing the order's two
    direction sums in place.  Returns the same DirectionSums."""
    opargs, wx, wy = _kernel_args(volume, model, operator, window_scale)
    if sums.shifts is None:
        sums.shifts = np.zeros(sums.data.shape[:3], dtype=np.int64)
    _pass_kernel(sums.data, sums.shifts, volume.costs, wx, wy, order.inc_x,
                 order.inc_y, np.int64(order.dirs[0]), np.int64(order.dirs[1]),
                 *opargs, renormalize)
    return sums


def assemble_marginals(sums, volume, model, operator="sfms", window_scale=1.0):
    """Marginal sums S_omega(x,v) = C(x,v) + sum_k M(S_k(x_k,v)/2)."""
    opargs, wx, wy = _kernel_args(volume, model, operator, window_scale)
    out = np.empty_like(volume.costs)
    _marginals_kernel(sums.data, volume.costs, wx, wy, *opargs, out)
    return out


def extract_solution(marginals):
    """Per-pixel argmin of the marginals; ties go to the lowest label."""
    return DisparityField(np.argmin(marginals, axis=2).astype(np.int64))


def solve(volume, model, iterations, operator="sfms", window_scale=1.0,
          scale=2, renormalize=False):
    """Run `iterations` rounds of the four passes, extracting and scoring the
    labeling after each round.

    Costs and lam are multiplied by `scale` up front so the message halving
    starts exact; reported energies use the original scale.  With
    renormalize=True every refreshed slice is shifted to put its minimum at
    0 or 1; the offsets are tracked so the labeling comes out bit-identical.
    Returns the final field and the per-iteration EnergyTrace.
    """
    if iterations < 1:
        raise ValueError("need at least one iteration")
    if scale < 1:
        raise ValueError("fixed-point scale must be >= 1")
    scaled_volume = CostVolume(volume.costs * scale, volume.space, volume.cmax * scale)
    scaled_model = model.scaled(scale)
    sums = DirectionSums.zeros(volume.height, volume.width, volume.space.count)
    trace = EnergyTrace()
    fld = None
    for _ in range(iterations):
        t0 = time.perf_counter()
        for order in SCAN_ORDERS:
            edp_pass(sums, scaled_volume, scaled_model, order, operator,
                     window_scale, renormalize)
        marg = assemble_marginals(sums, scaled_volume, scaled_model, operator, window_scale)
        fld = extract_solution(marg)
        elapsed = time.perf_counter() - t0
        sums.iteration += 1
        trace.entries.append(evaluate_energy(volume, model, fld))
        trace.seconds.append(elapsed)
    return fld, trace
