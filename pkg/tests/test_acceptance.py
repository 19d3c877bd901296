"""Acceptance suite: the eight release criteria.

Each test prints exactly one `criterion N (<name>): PASS|FAIL|SKIP` line
straight to the terminal (bypassing capture) before asserting, so a full run
always shows the per-criterion verdict.
"""

import os
import time
from pathlib import Path

import numpy as np
import pytest

from gridmrf.bench import bench_operators
from gridmrf.cli import EXIT_OK, main
from gridmrf.dsi import MatchConfig, build_cost_volume, estimate_lambda
from gridmrf.edp import DirectionSums, assemble_marginals, extract_solution, solve
from gridmrf.media import read_energy_log, read_image, write_image
from gridmrf.minplus import (
    apply_grms,
    apply_lrms,
    apply_sfms,
    operator_stats,
)
from gridmrf.model import LabelSpace, SmoothnessModel, motion_labels, stereo_labels
from gridmrf.scanline import solve_rows
from gridmrf.verify import check_chain, check_tiny, load_golden


def _report(capsys, num, name, status, detail=""):
    with capsys.disabled():
        line = f"criterion {num} ({name}): {status}"
        if detail:
            line += f"  [{detail}]"
        print(line, flush=True)


def test_criterion_1_operator_equivalence(capsys):
    """>= 1000 seeded slices across both geometries: GRMS and LRMS must be
    bit-identical to SFMS (costs to 10^6, lam to 10^4, g to 8)."""
    rng = np.random.default_rng(101)
    # steady-state sweep: compile everything before the clock starts
    warm = np.zeros(4, dtype=np.int64)
    for space in (stereo_labels(3), LabelSpace((0, 0), (1, 1))):
        m = SmoothnessModel(l1=1, g=1, lam=1)
        apply_sfms(warm, space, m)
        apply_grms(warm, space, m)
        apply_lrms(warm, space, m)
        apply_grms(warm, space, SmoothnessModel(l1=2, g=1, lam=1))

    slices = 1100
    mismatches = 0
    t0 = time.perf_counter()
    for i in range(slices):
        if i % 2 == 0:
            space = stereo_labels(int(rng.integers(1, 64)))
        else:
            space = LabelSpace((0, 0), (int(rng.integers(0, 9)), int(rng.integers(0, 9))))
        l1 = int(rng.integers(1, 3))
        model = SmoothnessModel(l1=l1, g=int(rng.integers(1, 9)),
                                lam=int(rng.integers(0, 10 ** 4 + 1)))
        w = int(rng.integers(1, 3))
        s = rng.integers(0, 10 ** 6 + 1, space.count).astype(np.int64)
        ref = apply_sfms(s, space, model, w)
        if not np.array_equal(apply_grms(s, space, model, w), ref):
            mismatches += 1
        if l1 == 1 and not np.array_equal(apply_lrms(s, space, model, w), ref):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 10.0
    _report(capsys, 1, "operator equivalence", "PASS" if ok else "FAIL",
            f"{slices} slices, {mismatches} mismatches, {elapsed:.2f}s")
    assert mismatches == 0
    assert elapsed < 10.0


def test_criterion_2_operation_counts(capsys):
    """Structural comparisons per vertex: SFMS=Q, GRMS=R(2g-1)+1, LRMS=3R+1
    at the two benchmark geometries."""
    narrow = stereo_labels(59)
    m5 = SmoothnessModel(l1=1, g=5, lam=1)
    box = motion_labels(13, 7)
    m3 = SmoothnessModel(l1=1, g=3, lam=1)
    got = {
        ("sfms", 1): operator_stats("sfms", narrow, m5).per_vertex,
        ("grms", 1): operator_stats("grms", narrow, m5).per_vertex,
        ("lrms", 1): operator_stats("lrms", narrow, m5).per_vertex,
        ("sfms", 2): operator_stats("sfms", box, m3).per_vertex,
        ("grms", 2): operator_stats("grms", box, m3).per_vertex,
        ("lrms", 2): operator_stats("lrms", box, m3).per_vertex,
    }
    want = {
        ("sfms", 1): 60,
        ("grms", 1): 1 * (2 * 5 - 1) + 1,
        ("lrms", 1): 3 * 1 + 1,
        ("sfms", 2): 405,
        ("grms", 2): 2 * (2 * 3 - 1) + 1,
        ("lrms", 2): 3 * 2 + 1,
    }
    ok = got == want
    _report(capsys, 2, "operation counts", "PASS" if ok else "FAIL",
            "Q=60: 60/10/4, Q=405: 405/11/7")
    assert got == want


def test_criterion_3_throughput(capsys):
    """Single-thread vertices/second: LRMS >= 5x SFMS at Q=60 (l1=1, g=5) and
    >= 20x at Q=405 (l1=1, g=3)."""
    ratios = {}
    for space, g, trials, floor in (
        (stereo_labels(59), 5, 1000, 5.0),
        (motion_labels(13, 7), 3, 300, 20.0),
    ):
        model = SmoothnessModel(l1=1, g=g, lam=4)
        rows = bench_operators(space, model, trials=trials, repeats=5)
        by = {r.operator: r for r in rows}
        ratio = by["lrms"].vertices_per_second / by["sfms"].vertices_per_second
        ratios[space.count] = (ratio, floor)
    ok = all(r >= f for r, f in ratios.values())
    detail = ", ".join(f"Q={q}: {r:.1f}x (need {f:.0f}x)"
                       for q, (r, f) in sorted(ratios.items()))
    _report(capsys, 3, "throughput", "PASS" if ok else "FAIL", detail)
    for q, (ratio, floor) in ratios.items():
        assert ratio >= floor, f"Q={q}: {ratio:.2f}x below {floor}x"


def test_criterion_4_chain_exactness(capsys):
    """All 200 committed chains: backtracked energy equals the exhaustive
    minimum; unique-optimum chains also pin the marginal argmin."""
    t0 = time.perf_counter()
    failures = check_chain()
    elapsed = time.perf_counter() - t0
    records = load_golden("chain")
    unique = sum(int(r["unique"]) for r in records)
    ok = not failures and elapsed < 30.0
    _report(capsys, 4, "chain exactness", "PASS" if ok else "FAIL",
            f"{len(records)} chains, {unique} unique optima, {elapsed:.2f}s")
    assert not failures, failures[:3]
    assert elapsed < 30.0


def test_criterion_5_solver_vs_grid_oracle(capsys):
    """On the committed 4x4/Q=3 suite the 8-iteration solver energy must not
    exceed its committed per-instance bound over the exhaustive minimum."""
    failures = check_tiny()
    records = load_golden("tiny")
    worst = max(int(r["edp8"]) / int(r["oracle"]) for r in records)
    exact = sum(int(r["edp8"]) == int(r["oracle"]) for r in records)
    ok = not failures
    _report(capsys, 5, "solver vs grid oracle", "PASS" if ok else "FAIL",
            f"{len(records)} instances, {exact} exact, worst ratio {worst:.4f}")
    assert not failures, failures[:3]


def test_criterion_6_degenerate_cases(capsys, stereo_pair, motion_pair):
    """Zero smoothness and the zero-message start must both reproduce the
    per-pixel data argmin on every bundled scene."""
    right, left, _ = stereo_pair(seed=61)
    ref, nxt, _ = motion_pair(seed=62)
    scenes = [
        build_cost_volume(right, left, MatchConfig(l2=2, space=stereo_labels(4))),
        build_cost_volume(ref, nxt, MatchConfig(l2=1, space=motion_labels(1, 1))),
    ]
    bad = 0
    for volume in scenes:
        want = np.argmin(volume.costs, axis=2)
        flat = SmoothnessModel(l1=1, g=3, lam=0)
        fld, _ = solve(volume, flat, iterations=1, operator="lrms")
        bad += not np.array_equal(fld.labels, want)
        fld, _ = solve_rows(volume, flat, "sfms")
        bad += not np.array_equal(fld.labels, want)
        # zero sums = iteration 0: marginals reduce to the raw costs
        smooth = SmoothnessModel(l1=1, g=3, lam=50)
        sums = DirectionSums.zeros(volume.height, volume.width, volume.space.count)
        fld = extract_solution(assemble_marginals(sums, volume, smooth))
        bad += not np.array_equal(fld.labels, want)
    ok = bad == 0
    _report(capsys, 6, "degenerate cases", "PASS" if ok else "FAIL",
            f"{len(scenes)} scenes x 3 checks")
    assert bad == 0


def test_criterion_7_scene_reproduction(capsys, tmp_path):
    """Conditional full-scale stereo run: needs a directory of converted
    scene images in GRIDMRF_CONES_DIR; the final per-pixel energy must land
    within 10% of 619.47."""
    root = os.environ.get("GRIDMRF_CONES_DIR")
    if not root:
        _report(capsys, 7, "scene reproduction", "SKIP",
                "GRIDMRF_CONES_DIR not set")
        pytest.skip("GRIDMRF_CONES_DIR not set")
    root = Path(root)
    pairs = [("im2.ppm", "im6.ppm"), ("left.ppm", "right.ppm")]
    found = next((p for p in pairs if (root / p[0]).exists() and (root / p[1]).exists()), None)
    if found is None:
        _report(capsys, 7, "scene reproduction", "SKIP",
                f"no image pair found under {root}")
        pytest.skip("no image pair found")
    left, right = (root / found[0]), (root / found[1])
    volume = build_cost_volume(
        read_image(right), read_image(left),
        MatchConfig(l2=2, space=stereo_labels(59)),
    )
    lam = estimate_lambda(volume, l1=1, l2=2, g=5)
    model = SmoothnessModel(l1=1, g=5, lam=lam)
    _, trace = solve(volume, model, iterations=8, operator="lrms")
    final = float(trace.entries[-1].per_pixel)
    target = 619.47
    ok = abs(final - target) <= 0.10 * target
    _report(capsys, 7, "scene reproduction", "PASS" if ok else "FAIL",
            f"final per-pixel {final:.2f} vs {target} +-10%")
    assert ok


def test_criterion_8_determinism(capsys, tmp_path, stereo_pair):
    """Two identical solve runs must produce bit-identical artifacts; only
    the timing column of the energy log is exempt."""
    right, left, _ = stereo_pair(seed=88)
    write_image(right, tmp_path / "right.ppm")
    write_image(left, tmp_path / "left.ppm")
    outs = []
    for run in ("run1", "run2"):
        out = tmp_path / run
        code = main([
            "solve", "stereo",
            "--left", str(tmp_path / "left.ppm"),
            "--right", str(tmp_path / "right.ppm"),
            "--max-disp", "4", "--iterations", "2", "--out-dir", str(out),
        ])
        assert code == EXIT_OK
        outs.append(out)
    capsys.readouterr()
    diffs = []
    for name in ("disparity.pgm", "disparity.pfm", "energy.png"):
        if (outs[0] / name).read_bytes() != (outs[1] / name).read_bytes():
            diffs.append(name)
    a = read_energy_log(outs[0] / "energy.csv")
    b = read_energy_log(outs[1] / "energy.csv")
    rows = [(r.iteration, r.total, r.data, r.smooth, r.per_pixel) for r in a]
    if rows != [(r.iteration, r.total, r.data, r.smooth, r.per_pixel) for r in b]:
        diffs.append("energy.csv")
    ok = not diffs
    _report(capsys, 8, "determinism", "PASS" if ok else "FAIL",
            "artifacts bit-identical, log equal outside timing" if ok
            else f"diverged: {diffs}")
    assert not diffs
