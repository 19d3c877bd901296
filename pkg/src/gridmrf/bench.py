"""Operator throughput measurement.

Batches of random slices go through one compiled loop per operator so the
measured time is kernel work, not call dispatch.  Alongside wall throughput
each row carries the structural comparisons-per-vertex count, and all
operators must emit bit-identical batches or the run aborts.
"""

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from .minplus import (
    OPERATOR_CODES,
    _dim_penalties,
    _grms_slice_at,
    _lrms_slice_at,
    _sfms_slice_at,
    grms_window,
    operator_stats,
    truncation_lut,
)


@dataclass(frozen=True)
class BenchRow:
    operator: str
    per_vertex: Fraction
    vertices_per_second: float
    seconds: float
    applications: int


class BenchMismatch(Exception):
    """Operators disagreed on a benchmark batch."""


@njit(cache=True)
def _batch(sflat, oflat, trials, q, w, op, n1, n2, lam, fg, pen_lut, pend,
           win, tmp, aux):
    # flat layout + base offsets: no per-slice view churn in the timed loop
    for i in range(trials):
        b = i * q
        if op == 0:
            _sfms_slice_at(sflat, b, pen_lut, w, oflat, b)
        elif op == 1:
            _grms_slice_at(sflat, b, n1, n2, pend, win, w, w * lam * fg,
                           oflat, b, tmp)
        else:
            _lrms_slice_at(sflat, b, n1, n2, w * lam, w * lam * fg,
                           oflat, b, tmp, aux)


def _run_batch(kind, slices, space, model, w, window_scale, repeats):
    op = OPERATOR_CODES[kind]
    n1 = space.sizes[0]
    n2 = space.sizes[1] if space.dims == 2 else 1
    win = grms_window(model, window_scale)
    pen_lut = truncation_lut(space, model) if op == 0 else np.zeros((1, 1), dtype=np.int64)
    pend = _dim_penalties(model, win)
    outs = np.empty_like(slices)
    tmp = np.empty(space.count, dtype=np.int64)
    aux = np.empty(space.count, dtype=np.int64)
    args = (slices.reshape(-1), outs.reshape(-1), np.int64(slices.shape[0]),
            np.int64(space.count), np.int64(w), np.int64(op), np.int64(n1),
            np.int64(n2), np.int64(model.lam), np.int64(model.fg), pen_lut,
            pend, np.int64(win), tmp, aux)
    _batch(*args)  # warm-up: compile + cache effects
    elapsed = float("inf")
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        _batch(*args)
        elapsed = min(elapsed, time.perf_counter() - t0)
    return outs, elapsed


def bench_operators(space, model, trials, seed=0, w=1, window_scale=1.0,
                    cost_range=10 ** 6, repeats=3):
    """Time each applicable operator over `trials` slice applications.

    Each batch runs `repeats` times after warm-up and the fastest pass wins,
    damping scheduler noise.  Returns one BenchRow per operator; raises
    BenchMismatch if any two operators disagree on the shared batch.
    """
    if trials <= 0:
        return []
    rng = np.random.default_rng(seed)
    slices = rng.integers(0, cost_range, (trials, space.count)).astype(np.int64)
    kinds = ["sfms", "grms"] + (["lrms"] if model.l1 == 1 else [])
    rows = []
    reference = None
    for kind in kinds:
        outs, elapsed = _run_batch(kind, slices, space, model, w, window_scale,
                                   repeats)
        if reference is None:
            reference = outs
        elif not np.array_equal(reference, outs):
            bad = int(np.argmax((reference != outs).any(axis=1)))
            raise BenchMismatch(f"{kind} disagrees with sfms on slice {bad}")
        vertices = trials * space.count
        rows.append(BenchRow(
            operator=kind,
            per_vertex=operator_stats(kind, space, model, window_scale).per_vertex,
            vertices_per_second=vertices / elapsed if elapsed > 0 else float("inf"),
            seconds=elapsed,
            applications=trials,
        ))
    return rows
