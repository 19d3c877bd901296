"""The three message operators: equivalence, saturation, and the structural
comparison counts."""

import numpy as np
import pytest

from gridmrf.minplus import (
    INF,
    apply_grms,
    apply_lrms,
    apply_operator,
    apply_sfms,
    check_edge_weight,
    grms_window,
    lrms_passes,
    operator_stats,
    slice_min,
    truncation_lut,
)
from gridmrf.model import LabelSpace, SmoothnessModel, motion_labels, stereo_labels
from gridmrf.oracle import oracle_minplus


def test_sfms_matches_exhaustive_oracle():
    rng = np.random.default_rng(3)
    for space in (stereo_labels(6), motion_labels(2, 1)):
        for l1 in (1, 2):
            model = SmoothnessModel(l1=l1, g=2, lam=int(rng.integers(1, 50)))
            for w in (1, 2):
                s = rng.integers(0, 1000, space.count).astype(np.int64)
                got = apply_sfms(s, space, model, w)
                want = oracle_minplus(s, space, model, w)
                assert np.array_equal(got, want)


def test_operators_agree_on_random_slices():
    rng = np.random.default_rng(17)
    for i in range(60):
        if i % 2 == 0:
            space = stereo_labels(int(rng.integers(1, 24)))
        else:
            space = LabelSpace((0, 0), (int(rng.integers(0, 6)), int(rng.integers(0, 6))))
        l1 = 1 + i % 2
        model = SmoothnessModel(l1=l1, g=int(rng.integers(1, 9)),
                                lam=int(rng.integers(0, 500)))
        s = rng.integers(0, 10 ** 6, space.count).astype(np.int64)
        ref = apply_sfms(s, space, model)
        assert np.array_equal(apply_grms(s, space, model), ref)
        if l1 == 1:
            assert np.array_equal(apply_lrms(s, space, model), ref)


def test_lrms_passes_structure():
    """The forward scan is a prefix recursion over s itself; the backward scan
    is strict (position q-1 sees nothing); their min plus the clip is LRMS."""
    model = SmoothnessModel(l1=1, g=3, lam=5)
    s = np.array([40, 3, 0, 19, 22, 7], dtype=np.int64)
    fwd, bwd, comb = lrms_passes(s, model, w=2)
    wlam = 2 * 5
    assert fwd[0] == s[0]
    for v in range(1, len(s)):
        assert fwd[v] == min(fwd[v - 1] + wlam, s[v])
    assert bwd[-1] == INF
    for v in range(len(s) - 2, -1, -1):
        assert bwd[v] == min(bwd[v + 1], s[v + 1]) + wlam
    clip = int(s.min()) + wlam * model.fg
    got = apply_lrms(s, stereo_labels(5), model, w=2)
    assert got.tolist() == [min(c, clip) for c in comb]


def test_lrms_requires_linear_prior():
    model = SmoothnessModel(l1=2, g=3, lam=5)
    s = np.zeros(4, dtype=np.int64)
    with pytest.raises(ValueError):
        apply_lrms(s, stereo_labels(3), model)
    with pytest.raises(ValueError):
        lrms_passes(s, model)
    with pytest.raises(ValueError):
        operator_stats("lrms", stereo_labels(3), model)


def test_saturation_clamps_at_sentinel():
    space = stereo_labels(2)
    model = SmoothnessModel(l1=1, g=1, lam=int(INF) - 1)
    s = np.full(3, INF, dtype=np.int64)
    for kind in ("sfms", "grms", "lrms"):
        out = apply_operator(kind, s, space, model)
        assert np.all(out == INF)
    # negative inputs stay exact: no wrap anywhere in the adds
    s = np.array([-int(INF), 0, int(INF)], dtype=np.int64)
    ref = oracle_minplus(s, space, model)
    ref = np.minimum(ref, int(INF))
    for kind in ("sfms", "grms", "lrms"):
        assert np.array_equal(apply_operator(kind, s, space, model), ref)


def test_huge_penalty_scale_keeps_operators_equal():
    # lam at the very top of the validated domain, both 1D and 2D
    for space in (stereo_labels(11), LabelSpace((0, 0), (4, 3))):
        model = SmoothnessModel(l1=1, g=3, lam=(int(INF) - 1) // 3)
        rng = np.random.default_rng(5)
        s = rng.integers(0, 10 ** 9, space.count).astype(np.int64)
        ref = apply_sfms(s, space, model)
        assert np.array_equal(apply_grms(s, space, model), ref)
        assert np.array_equal(apply_lrms(s, space, model), ref)


def test_slice_min_breaks_ties_low():
    val, arg = slice_min(np.array([7, 3, 3, 9], dtype=np.int64))
    assert (val, arg) == (3, 1)


def test_grms_window_scales_and_validates():
    model = SmoothnessModel(l1=1, g=5, lam=1)
    assert grms_window(model) == 5
    assert grms_window(model, 1.3) == 7  # ceil(6.5)
    with pytest.raises(ValueError):
        grms_window(model, 0.5)


def test_check_edge_weight_bounds():
    model = SmoothnessModel(l1=1, g=1, lam=int(INF) - 1)
    check_edge_weight(1, model)
    with pytest.raises(ValueError):
        check_edge_weight(2, model)
    with pytest.raises(ValueError):
        check_edge_weight(-1, model)


def test_slice_validation():
    space = stereo_labels(3)
    model = SmoothnessModel(l1=1, g=1, lam=1)
    with pytest.raises(ValueError):
        apply_sfms(np.empty(0, dtype=np.int64), space, model)
    with pytest.raises(ValueError):
        apply_sfms(np.zeros((2, 2), dtype=np.int64), space, model)
    with pytest.raises(ValueError):
        apply_sfms(np.zeros(3, dtype=np.int64), space, model)  # wrong length
    with pytest.raises(ValueError):
        apply_sfms(np.array([0, 0, 0, int(INF) + 1], dtype=np.int64), space, model)
    with pytest.raises(ValueError):
        apply_sfms(np.array([0, 0, 0, -int(INF) - 1], dtype=np.int64), space, model)


def test_apply_operator_dispatch():
    space = stereo_labels(2)
    model = SmoothnessModel(l1=1, g=1, lam=2)
    s = np.array([5, 0, 9], dtype=np.int64)
    assert np.array_equal(apply_operator("sfms", s, space, model),
                          apply_operator("lrms", s, space, model))
    with pytest.raises(ValueError):
        apply_operator("fancy", s, space, model)


def test_operator_stats_counts():
    space60 = stereo_labels(59)
    m = SmoothnessModel(l1=1, g=5, lam=1)
    assert operator_stats("sfms", space60, m).per_vertex == 60
    assert operator_stats("grms", space60, m).per_vertex == (2 * 5 - 1) + 1
    assert operator_stats("lrms", space60, m).per_vertex == 3 + 1
    box = motion_labels(13, 7)
    m3 = SmoothnessModel(l1=1, g=3, lam=1)
    assert operator_stats("sfms", box, m3).per_vertex == 405
    assert operator_stats("grms", box, m3).per_vertex == 2 * (2 * 3 - 1) + 1
    assert operator_stats("lrms", box, m3).per_vertex == 3 * 2 + 1
    # a fractional window scale keeps the count integral via the ceiling
    assert operator_stats("grms", box, m3, window_scale=1.5).per_vertex == 2 * (2 * 5 - 1) + 1
    with pytest.raises(ValueError):
        operator_stats("fancy", space60, m)


def test_truncation_lut_symmetry():
    space = motion_labels(2, 1)
    model = SmoothnessModel(l1=2, g=2, lam=3)
    lut = truncation_lut(space, model)
    assert lut.shape == (space.count, space.count)
    assert np.array_equal(lut, lut.T)
    assert np.all(np.diag(lut) == 0)
    assert lut.max() == 3 * 4
