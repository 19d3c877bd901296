"""Exact DP over single scanlines: forward recurrence, backtracking, and the
bidirectional-marginal variant whose per-position argmin recovers the same
path when the optimum is unique.

Rows (or columns) of a 2D problem are independent chains here; coupling
across scanlines is the iterated solver's job (see edp).
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .minplus import (
    INF,
    OPERATOR_CODES,
    _dim_penalties,
    _grms_slice,
    _lrms_slice,
    _message,
    _slice_min,
    check_edge_weight,
    grms_window,
    truncation_lut,
)
from .model import DisparityField, EdgeWeights, SmoothnessModel, evaluate_energy


@dataclass(frozen=True, eq=False)
class ScanlineProblem:
    """A chain of cost slices with one shared label space.

    weights holds the per-edge multiplier between positions x and x+1;
    None means all ones.
    """

    costs: np.ndarray
    space: object
    model: SmoothnessModel
    weights: np.ndarray | None = None

    def __post_init__(self):
        costs = np.ascontiguousarray(self.costs, dtype=np.int64)
        object.__setattr__(self, "costs", costs)
        if costs.ndim != 2 or costs.shape[0] < 1:
            raise ValueError("costs must be (length >= 1, labels)")
        if costs.shape[1] != self.space.count:
            raise ValueError("slice width does not match label space")
        if self.weights is not None:
            w = np.ascontiguousarray(self.weights, dtype=np.int64)
            if w.shape != (costs.shape[0] - 1,):
                raise ValueError("need one weight per chain edge")
            if w.size:
                check_edge_weight(int(w.max()), self.model)
                if w.min() < 0:
                    raise ValueError("edge weights must be >= 0")
            object.__setattr__(self, "weights", w)

    @property
    def length(self):
        return self.costs.shape[0]

    def edge_weights(self):
        if self.weights is not None:
            return self.weights
        return np.ones(self.length - 1, dtype=np.int64)


@njit(cache=True, inline="always")
def _ipow(d, l1):
    return d * d if l1 == 2 else d


@njit(cache=True)
def _sfms_slice_arg(s, pen, w, out, arg):
    # same scan as _sfms_slice but records the argmin (strict < keeps the
    # lowest tied label)
    q = s.shape[0]
    for vp in range(q):
        best = INF
        barg = 0
        for v in range(q):
            c = s[v] + w * pen[vp, v]
            if c > INF:
                c = INF
            if c < best:
                best = c
                barg = v
        out[vp] = best
        arg[vp] = barg


@njit(cache=True)
def _recover_preds(s, msg, n1, n2, l1, g, lam, fg, w, smin, amin, arg):
    # The true-penalty ties of msg(v') split into candidates inside the
    # per-dimension window |d_r| <= g-1 and, when the clip value
    # smin + w*lam*fg is tied, the out-of-window minimum label amin.  The
    # lowest linear tie overall is min(first in-window tie, amin if tied).
    q = n1 * n2
    clip = smin + w * lam * fg
    if clip > INF:
        clip = INF
    for vp in range(q):
        m = msg[vp]
        best = q
        if clip == m:
            best = amin
        c1p = vp % n1
        c2p = vp // n1
        lo2 = max(0, c2p - (g - 1))
        hi2 = min(n2 - 1, c2p + (g - 1))
        lo1 = max(0, c1p - (g - 1))
        hi1 = min(n1 - 1, c1p + (g - 1))
        found = q
        for c2 in range(lo2, hi2 + 1):
            d2 = c2 - c2p
            if d2 < 0:
                d2 = -d2
            for c1 in range(lo1, hi1 + 1):
                d1 = c1 - c1p
                if d1 < 0:
                    d1 = -d1
                f = _ipow(d1, l1) + _ipow(d2, l1)
                if f > fg:
                    f = fg
                v = c2 * n1 + c1
                c = s[v] + w * lam * f
                if c > INF:
                    c = INF
                if c == m:
                    found = v
                    break
            if found < q:
                break
        if found < best:
            best = found
        if best == q:
            # unreachable by construction; full rescan keeps us exact
            for v in range(q):
                du1 = v % n1 - c1p
                if du1 < 0:
                    du1 = -du1
                du2 = v // n1 - c2p
                if du2 < 0:
                    du2 = -du2
                f = _ipow(du1, l1) + _ipow(du2, l1)
                if f > fg:
                    f = fg
                if s[v] + w * lam * f == m:
                    best = v
                    break
        arg[vp] = best


@njit(cache=True)
def _forward_kernel(costs, wline, n1, n2, l1, g, lam, fg, op, pen_lut, pend, win, sums, table):
    length, q = costs.shape
    for v in range(q):
        sums[0, v] = costs[0, v]
        table[0, v] = 0
    msg = np.empty(q, dtype=np.int64)
    tmp = np.empty(q, dtype=np.int64)
    aux = np.empty(q, dtype=np.int64)
    arg = np.empty(q, dtype=np.int64)
    for x in range(1, length):
        w = wline[x - 1]
        s = sums[x - 1]
        if op == 0:
            _sfms_slice_arg(s, pen_lut, w, msg, arg)
        else:
            smin, amin = _slice_min(s)
            if op == 1:
                _grms_slice(s, n1, n2, pend, win, w, w * lam * fg, msg, tmp)
            else:
                _lrms_slice(s, n1, n2, w * lam, w * lam * fg, msg, tmp, aux)
            _recover_preds(s, msg, n1, n2, l1, g, lam, fg, w, smin, amin, arg)
        for v in range(q):
            c = costs[x, v] + msg[v]
            if c > INF:
                c = INF
            sums[x, v] = c
            table[x, v] = arg[v]


def _operator_setup(problem, operator, window_scale):
    op = OPERATOR_CODES[operator]
    model = problem.model
    if op == OPERATOR_CODES["lrms"] and model.l1 != 1:
        raise ValueError("LRMS requires a truncated-linear prior (l1=1)")
    space = problem.space
    sizes = space.sizes
    n1 = sizes[0]
    n2 = sizes[1] if space.dims == 2 else 1
    win = grms_window(model, window_scale)
    pen_lut = truncation_lut(space, model) if op == 0 else np.zeros((1, 1), dtype=np.int64)
    pend = _dim_penalties(model, win)
    return op, n1, n2, win, pen_lut, pend


def forward_pass(problem, operator="sfms", window_scale=1.0):
    """Optimal sums S(x,·) (zero boundary: S(0,·)=C(0,·)) plus the predecessor
    table; table rows for x >= 1 hold the lowest tied argmin candidate."""
    op, n1, n2, win, pen_lut, pend = _operator_setup(problem, operator, window_scale)
    m = problem.model
    sums = np.empty_like(problem.costs)
    table = np.zeros(problem.costs.shape, dtype=np.int64)
    _forward_kernel(
        problem.costs, problem.edge_weights(), n1, n2,
        np.int64(m.l1), np.int64(m.g), np.int64(m.lam), np.int64(m.fg),
        np.int64(op), pen_lut, pend, np.int64(win), sums, table,
    )
    return sums, table


def backtrack(sums, table):
    """Optimal path from the final sums; returns (labels, minimal energy)."""
    length = sums.shape[0]
    labels = np.empty(length, dtype=np.int64)
    v = int(np.argmin(sums[length - 1]))
    energy = int(sums[length - 1, v])
    labels[length - 1] = v
    for x in range(length - 1, 0, -1):
        v = int(table[x, v])
        labels[x - 1] = v
    return labels, energy


def bidirectional_marginals(problem, operator="sfms", window_scale=1.0):
    """S_omega(x,·) = M(S_fwd(x-1,·)) + C(x,·) + M(S_bwd(x+1,·)); out-of-range
    messages are zero.  min_v S_omega(x,v) equals the chain minimum at every x.
    """
    op, n1, n2, win, pen_lut, pend = _operator_setup(problem, operator, window_scale)
    m = problem.model
    fwd, _ = forward_pass(problem, operator, window_scale)
    rev = ScanlineProblem(
        problem.costs[::-1], problem.space, problem.model,
        None if problem.weights is None else problem.weights[::-1],
    )
    bwd_r, _ = forward_pass(rev, operator, window_scale)
    bwd = bwd_r[::-1]

    length, q = problem.costs.shape
    wline = problem.edge_weights()
    out = np.empty_like(problem.costs)
    msg = np.empty(q, dtype=np.int64)
    tmp = np.empty(q, dtype=np.int64)
    aux = np.empty(q, dtype=np.int64)
    for x in range(length):
        total = problem.costs[x].astype(np.int64).copy()
        if x > 0:
            _message(fwd[x - 1], np.int64(wline[x - 1]), np.int64(op), n1, n2,
                     np.int64(m.lam), np.int64(m.fg), pen_lut, pend, np.int64(win),
                     msg, tmp, aux)
            total += msg
        if x < length - 1:
            _message(bwd[x + 1], np.int64(wline[x]), np.int64(op), n1, n2,
                     np.int64(m.lam), np.int64(m.fg), pen_lut, pend, np.int64(win),
                     msg, tmp, aux)
            total += msg
        out[x] = np.minimum(total, INF)
    return out


def marginal_argmin_solution(marginals):
    """Per-position argmin of the marginal sums, ties to the lowest label."""
    return np.argmin(marginals, axis=1).astype(np.int64)


def row_problems(volume, model):
    """One ScanlineProblem per image row, with the row's horizontal weights."""
    wx = model.weights.wx if model.weights is not None else None
    for y in range(volume.height):
        yield ScanlineProblem(
            volume.costs[y], volume.space, model,
            None if wx is None else wx[y],
        )


def solve_rows(volume, model, operator="sfms", window_scale=1.0):
    """Independent per-row DP: exact per scanline, ignores vertical edges."""
    labels = np.empty((volume.height, volume.width), dtype=np.int64)
    for y, problem in enumerate(row_problems(volume, model)):
        sums, table = forward_pass(problem, operator, window_scale)
        labels[y], _ = backtrack(sums, table)
    field = DisparityField(labels)
    return field, evaluate_energy(volume, model, field)
