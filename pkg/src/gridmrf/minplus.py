"""Min-plus message operators over label slices.

Three interchangeable algorithms compute the same transform

    out(v') = min_v [ s(v) + w * lam * min(sum_r |u_r|^l1, g^l1) ],  u = v' - v:

SFMS scans all Q candidates; GRMS scans a per-dimension window and clips;
LRMS (l1=1 only) runs two-pass recursions per dimension and clips.  GRMS and
LRMS are bit-identical to SFMS for every valid model — the equivalence suite
enforces it.

Slices are flat int64 arrays laid out with dimension 1 varying fastest.
INF is the saturation sentinel: adds clamp at INF instead of wrapping.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numba import njit

from .model import INF, LabelSpace

OP_SFMS = 0
OP_GRMS = 1
OP_LRMS = 2

OPERATOR_CODES = {"sfms": OP_SFMS, "grms": OP_GRMS, "lrms": OP_LRMS}


@dataclass(frozen=True)
class OperatorStats:
    """Candidate comparisons per vertex, by structural count of the kernel."""

    kind: str
    per_vertex: Fraction

    def __post_init__(self):
        assert self.per_vertex >= 1


@lru_cache(maxsize=64)
def _lut_cached(lows, highs, l1, g, lam):
    offs = LabelSpace(lows, highs).offsets
    du = np.abs(offs[:, None, :] - offs[None, :, :])
    f = (du.astype(np.int64) ** l1).sum(axis=2)
    pen = lam * np.minimum(f, g ** l1)
    pen = np.ascontiguousarray(pen, dtype=np.int64)
    pen.setflags(write=False)
    return pen


def truncation_lut(space, model):
    """(Q, Q) table pen[v', v] = lam * min(f(v'-v), g^l1); weight w excluded."""
    return _lut_cached(space.lows, space.highs, model.l1, model.g, model.lam)


def _dim_penalties(model, window):
    """Per-dimension untruncated penalties lam*|d|^l1 for |d| <= window-1."""
    d = np.abs(np.arange(-(window - 1), window, dtype=np.int64))
    return model.lam * d ** model.l1


@njit(cache=True, inline="always")
def _sfms_slice_at(s, sb, pen, w, out, ob):
    q = pen.shape[0]
    for vp in range(q):
        best = INF
        for v in range(q):
            c = s[sb + v] + w * pen[vp, v]
            if c > INF:
                c = INF
            if c < best:
                best = c
        out[ob + vp] = best


@njit(cache=True)
def _sfms_slice(s, pen, w, out):
    _sfms_slice_at(s, 0, pen, w, out, 0)


@njit(cache=True, inline="always")
def _window_min_axis_at(src, sb, n1, n2, stride_is_dim2, pend, win, w, dst, db):
    # dst[c] = min over |d| <= win-1 of src[c + d (along axis)] + w*pend[d];
    # out-of-range reads count as INF (structural window, constant fan-in)
    for c2 in range(n2):
        for c1 in range(n1):
            i = c2 * n1 + c1
            best = INF
            for d in range(-(win - 1), win):
                if stride_is_dim2:
                    j2 = c2 + d
                    if j2 < 0 or j2 >= n2:
                        continue
                    c = src[sb + j2 * n1 + c1] + w * pend[d + win - 1]
                else:
                    j1 = c1 + d
                    if j1 < 0 or j1 >= n1:
                        continue
                    c = src[sb + c2 * n1 + j1] + w * pend[d + win - 1]
                if c > INF:
                    c = INF
                if c < best:
                    best = c
            dst[db + i] = best


@njit(cache=True, inline="always")
def _grms_slice_at(s, sb, n1, n2, pend, win, w, wlam_fg, out, ob, tmp):
    q = n1 * n2
    smin = s[sb]
    for i in range(sb + 1, sb + q):
        if s[i] < smin:
            smin = s[i]
    clip = smin + wlam_fg
    if clip > INF:
        clip = INF
    if n2 > 1:
        _window_min_axis_at(s, sb, n1, n2, False, pend, win, w, tmp, 0)
        _window_min_axis_at(tmp, 0, n1, n2, True, pend, win, w, out, ob)
    else:
        _window_min_axis_at(s, sb, n1, n2, False, pend, win, w, out, ob)
    for i in range(ob, ob + q):
        if clip < out[i]:
            out[i] = clip


@njit(cache=True)
def _grms_slice(s, n1, n2, pend, win, w, wlam_fg, out, tmp):
    _grms_slice_at(s, 0, n1, n2, pend, win, w, wlam_fg, out, 0, tmp)


@njit(cache=True, inline="always")
def _lrms_line_ramp(src, dst, sb, db, n, wlam, clip, scratch):
    # the linear ramp separates from the min: the non-strict forward pass is
    # prefix_min(s[j] - wlam*j) + wlam*k and the strict backward pass is
    # suffix_min(s[j] + wlam*j) - wlam*k, leaving one carried min per element
    # with the ramp bookkeeping off the critical chain.  Per-step saturation
    # of the reference recurrence only matters above INF, and the combined
    # value never exceeds INF because forward(k) <= s[k]; the caller
    # guarantees wlam*(n-1) <= INF-1 so no offset overflows.
    run = src[sb]
    scratch[0] = run
    off = np.int64(0)
    for k in range(1, n):
        off += wlam
        cur = src[sb + k] - off
        if cur < run:
            run = cur
        scratch[k] = run
    b = INF + off  # empty-suffix sentinel: b - wlam*k >= INF >= forward(k)
    for k in range(n - 1, -1, -1):
        f = scratch[k] + off
        bw = b - off
        o = f if f < bw else bw
        if clip < o:
            o = clip
        t = src[sb + k] + off
        if t < b:
            b = t
        dst[db + k] = o
        off -= wlam


@njit(cache=True, inline="always")
def _lrms_line_bell(src, dst, sb, db, n, wlam, clip, scratch):
    # direct Bellman recurrences, no accumulated offsets: valid for every
    # validated wlam since values stay <= INF and INF + wlam fits in int64.
    # Forward is non-strict, backward strict from an INF boundary; per-step
    # saturation only alters values above INF, which always lose the combine.
    r = src[sb]
    scratch[0] = r
    for k in range(1, n):
        r = min(r + wlam, src[sb + k])
        scratch[k] = r
    b = INF
    dst[db + n - 1] = min(scratch[n - 1], clip)
    for k in range(n - 2, -1, -1):
        b = min(b, src[sb + k + 1]) + wlam
        dst[db + k] = min(min(scratch[k], b), clip)


@njit(cache=True, inline="always")
def _lrms_line_bell_raw(src, dst, sb, db, n, wlam, scratch):
    # uncapped Bellman line: the combined value is bounded by the forward
    # pass, itself bounded by the inputs, so no INF cap is ever needed.
    # Returns the line minimum so callers get smin without a separate pass.
    r = src[sb]
    m = r
    scratch[0] = r
    for k in range(1, n):
        v = src[sb + k]
        if v < m:
            m = v
        r = min(r + wlam, v)
        scratch[k] = r
    b = INF
    dst[db + n - 1] = scratch[n - 1]
    for k in range(n - 2, -1, -1):
        b = min(b, src[sb + k + 1]) + wlam
        dst[db + k] = min(scratch[k], b)
    return m


@njit(cache=True, inline="always")
def _lrms_slice_at(s, sb, n1, n2, wlam, wlam_fg, out, ob, tmp, aux):
    q = n1 * n2
    if n2 == 1:
        smin = s[sb]
        for i in range(sb + 1, sb + q):
            if s[i] < smin:
                smin = s[i]
        clip = smin + wlam_fg
        if clip > INF:
            clip = INF
        # the ramp line is faster on long chains but its offsets accumulate;
        # fall back to the offset-free Bellman line when they could overflow
        if n1 == 1 or wlam <= (INF - 1) // (n1 - 1):
            _lrms_line_ramp(s, out, sb, ob, n1, wlam, clip, tmp)
        else:
            _lrms_line_bell(s, out, sb, ob, n1, wlam, clip, tmp)
        return
    # dimension 1 uncapped (the cap applies once, after all dimensions)
    smin = s[sb]
    for c2 in range(n2):
        m = _lrms_line_bell_raw(s, tmp, sb + c2 * n1, c2 * n1, n1, wlam, aux)
        if m < smin:
            smin = m
    clip = smin + wlam_fg
    if clip > INF:
        clip = INF
    # dimension 2 as whole-row recurrences instead of per-column scans:
    # forward Bellman rows, a clip-only last row, then the strict backward
    # recurrence fused with combine and clip on the way down
    for i in range(n1):
        out[ob + i] = tmp[i]
    for j in range(n1, q):
        x = out[ob + j - n1] + wlam
        y = tmp[j]
        out[ob + j] = x if x < y else y
    for j in range(q - n1, q):
        o = out[ob + j]
        if clip < o:
            o = clip
        out[ob + j] = o
    for i in range(q - n1, q):
        aux[i] = INF
    for j in range(q - n1 - 1, -1, -1):
        x = tmp[j + n1]
        y = aux[j + n1]
        m = x if x < y else y
        b = m + wlam
        aux[j] = b
        o = out[ob + j]
        if b < o:
            o = b
        if clip < o:
            o = clip
        out[ob + j] = o


@njit(cache=True)
def _lrms_slice(s, n1, n2, wlam, wlam_fg, out, tmp, aux):
    _lrms_slice_at(s, 0, n1, n2, wlam, wlam_fg, out, 0, tmp, aux)


@njit(cache=True, inline="always")
def _message(s, w, op, n1, n2, lam, fg, pen_lut, pend, win, msg, tmp, aux):
    # operator dispatch for kernels: msg <- M(s) under edge weight w
    if op == 0:
        _sfms_slice(s, pen_lut, w, msg)
    elif op == 1:
        _grms_slice(s, n1, n2, pend, win, w, w * lam * fg, msg, tmp)
    else:
        _lrms_slice(s, n1, n2, w * lam, w * lam * fg, msg, tmp, aux)


@njit(cache=True)
def _slice_min(s):
    best = s[0]
    arg = 0
    for i in range(1, s.shape[0]):
        if s[i] < best:
            best = s[i]
            arg = i
    return best, arg


def _as_slice(s):
    s = np.ascontiguousarray(s, dtype=np.int64)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("slice must be a nonempty 1D array")
    if s.max() > INF or s.min() < -INF:
        raise ValueError("slice values must lie in [-INF, INF]")
    return s


def _dims(space, s):
    if s.shape[0] != space.count:
        raise ValueError(f"slice length {s.shape[0]} != label count {space.count}")
    sizes = space.sizes
    n1 = sizes[0]
    n2 = sizes[1] if space.dims == 2 else 1
    return n1, n2


def grms_window(model, window_scale=1.0):
    if window_scale < 1:
        raise ValueError("window_scale must be >= 1")
    return math.ceil(window_scale * model.g)


def check_edge_weight(w, model):
    """Weights must keep every penalty increment below the sentinel so kernel
    adds cannot wrap (exact check in unbounded Python ints)."""
    if w < 0 or w * model.lam * model.fg >= int(INF):
        raise ValueError("edge weight must be >= 0 with w*lam*g^l1 below 2**62")


def apply_sfms(s, space, model, w=1):
    """Straightforward minimum search: all Q candidates per output label."""
    s = _as_slice(s)
    _dims(space, s)
    check_edge_weight(w, model)
    out = np.empty_like(s)
    _sfms_slice(s, truncation_lut(space, model), np.int64(w), out)
    return out


def apply_grms(s, space, model, w=1, window_scale=1.0):
    """Guided search: per-dimension window of 2*ceil(a*g)-1 candidates, then
    clip with min_v s(v) + w*lam*g^l1.  Bit-identical to apply_sfms."""
    s = _as_slice(s)
    n1, n2 = _dims(space, s)
    check_edge_weight(w, model)
    win = grms_window(model, window_scale)
    out = np.empty_like(s)
    tmp = np.empty_like(s)
    _grms_slice(s, n1, n2, _dim_penalties(model, win), np.int64(win),
                np.int64(w), np.int64(w * model.lam * model.fg), out, tmp)
    return out


def apply_lrms(s, space, model, w=1):
    """Low-constant recursive search: per dimension one strict backward scan
    and one forward scan with combine; then the clip.  l1=1 only."""
    if model.l1 != 1:
        raise ValueError("LRMS requires a truncated-linear prior (l1=1)")
    s = _as_slice(s)
    n1, n2 = _dims(space, s)
    check_edge_weight(w, model)
    out = np.empty_like(s)
    tmp = np.empty_like(s)
    aux = np.empty_like(s)
    _lrms_slice(s, n1, n2, np.int64(w * model.lam),
                np.int64(w * model.lam * model.fg), out, tmp, aux)
    return out


def slice_min(s):
    """(min value, argmin label); ties break to the lowest linear index."""
    s = _as_slice(s)
    val, arg = _slice_min(s)
    return int(val), int(arg)


def lrms_passes(s, model, w=1):
    """1D LRMS intermediates (forward, backward, combined) in plain Python,
    for inspection; the backward pass is the strict suffix recursion."""
    if model.l1 != 1:
        raise ValueError("LRMS requires a truncated-linear prior (l1=1)")
    s = [int(v) for v in s]
    q = len(s)
    wlam = w * model.lam
    fwd = list(s)
    for v in range(1, q):
        fwd[v] = min(fwd[v - 1] + wlam, fwd[v])
    bwd = [int(INF)] * q
    for v in range(q - 2, -1, -1):
        bwd[v] = min(min(bwd[v + 1], s[v + 1]) + wlam, int(INF))
    comb = [min(a, b) for a, b in zip(fwd, bwd)]
    return fwd, bwd, comb


def apply_operator(kind, s, space, model, w=1, window_scale=1.0):
    if kind == "sfms":
        return apply_sfms(s, space, model, w)
    if kind == "grms":
        return apply_grms(s, space, model, w, window_scale)
    if kind == "lrms":
        return apply_lrms(s, space, model, w)
    raise ValueError(f"unknown operator {kind!r}")


def operator_stats(kind, space, model, window_scale=1.0):
    """Comparisons per vertex by structural count: SFMS examines Q candidates,
    GRMS R*(2*ceil(a*g)-1) window candidates plus the clip, LRMS 3 per
    dimension (backward, forward, combine) plus the clip."""
    r = space.dims
    if kind == "sfms":
        n = space.count
    elif kind == "grms":
        n = r * (2 * grms_window(model, window_scale) - 1) + 1
    elif kind == "lrms":
        if model.l1 != 1:
            raise ValueError("LRMS requires a truncated-linear prior (l1=1)")
        n = 3 * r + 1
    else:
        raise ValueError(f"unknown operator {kind!r}")
    return OperatorStats(kind, Fraction(n))
