"""End-to-end command runs: artifacts, recovered fields, exit codes."""

import subprocess
import sys

import numpy as np
import pytest

from gridmrf.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, main
from gridmrf.media import read_energy_log, read_flow, read_image, read_pfm, write_image
from gridmrf.model import PixelGrid, motion_labels


def _solve_stereo(tmp_path, stereo_pair, extra=(), disp=2, max_disp=4):
    right, left, _ = stereo_pair(disp=disp)
    write_image(right, tmp_path / "right.ppm")
    write_image(left, tmp_path / "left.ppm")
    out = tmp_path / "out"
    code = main([
        "solve", "stereo",
        "--left", str(tmp_path / "left.ppm"),
        "--right", str(tmp_path / "right.ppm"),
        "--max-disp", str(max_disp), "--iterations", "2",
        "--out-dir", str(out), *extra,
    ])
    return code, out


def test_stereo_solve_recovers_planted_disparity(tmp_path, stereo_pair, capsys):
    code, out = _solve_stereo(tmp_path, stereo_pair)
    assert code == EXIT_OK
    for name in ("disparity.pgm", "disparity.pfm", "energy.csv", "energy.png"):
        assert (out / name).exists(), name
    captured = capsys.readouterr()
    assert "per_pixel_energy=" in captured.out
    assert "total_energy=" in captured.out
    assert "MODE=stereo" in captured.err
    assert "LAM=" in captured.err
    plane = read_pfm(out / "disparity.pfm")
    interior = plane[:, :plane.shape[1] - 2]
    assert (interior == 2.0).mean() > 0.9
    rows = read_energy_log(out / "energy.csv")
    assert len(rows) == 2


def test_stereo_scanline_algo(tmp_path, stereo_pair):
    code, out = _solve_stereo(tmp_path, stereo_pair,
                              extra=("--algo", "scanline", "--operator", "sfms"))
    assert code == EXIT_OK
    assert len(read_energy_log(out / "energy.csv")) == 1


def test_motion_solve_recovers_planted_flow(tmp_path, motion_pair, capsys):
    ref, nxt, (vx, vy) = motion_pair()
    write_image(ref, tmp_path / "ref.ppm")
    write_image(nxt, tmp_path / "next.ppm")
    out = tmp_path / "out"
    code = main([
        "solve", "motion",
        "--ref", str(tmp_path / "ref.ppm"),
        "--next", str(tmp_path / "next.ppm"),
        "--max-vx", "2", "--max-vy", "2",
        "--iterations", "2", "--algo", "scanline", "--operator", "lrms",
        "--out-dir", str(out),
    ])
    assert code == EXIT_OK
    uv = read_flow(out / "flow.flo")
    render = read_image(out / "flow.ppm")
    assert render.samples.shape == uv.shape[:2] + (3,)
    interior = uv[:uv.shape[0] - vy, :uv.shape[1] - vx]
    hit = (interior == (vx, vy)).all(axis=2)
    assert hit.mean() > 0.9
    capsys.readouterr()


def test_composite_stereo_triplet(tmp_path, capsys):
    rng = np.random.default_rng(6)
    h, w, d = 8, 14, 1
    canvas = rng.integers(0, 256, size=(h, w + 2 * d, 3))
    views = {
        "left.ppm": PixelGrid(canvas[:, :w]),
        "middle.ppm": PixelGrid(canvas[:, d:d + w]),
        "right.ppm": PixelGrid(canvas[:, 2 * d:2 * d + w]),
    }
    for name, grid in views.items():
        write_image(grid, tmp_path / name)
    out = tmp_path / "out"
    code = main([
        "solve", "stereo", "--composite",
        "--left", str(tmp_path / "left.ppm"),
        "--right", str(tmp_path / "right.ppm"),
        "--middle", str(tmp_path / "middle.ppm"),
        "--max-disp", "3", "--iterations", "2", "--out-dir", str(out),
    ])
    assert code == EXIT_OK
    assert "COMPOSITE=True" in capsys.readouterr().err
    plane = read_pfm(out / "disparity.pfm")
    assert (plane[:, d:w - d] == float(d)).mean() > 0.9


def test_bench_reports_all_operators(capsys):
    assert main(["bench", "--labels", "8", "--trials", "200"]) == EXIT_OK
    out = capsys.readouterr().out
    for kind in ("sfms", "grms", "lrms"):
        assert f"operator={kind}" in out
    assert "speedup_lrms_over_sfms=" in out


def test_bench_box_figure(tmp_path, capsys):
    fig = tmp_path / "bench.png"
    assert main(["bench", "--box", "3x3", "--trials", "100",
                 "--out-figure", str(fig)]) == EXIT_OK
    assert fig.exists()
    capsys.readouterr()


def test_verify_chain_suite(capsys):
    assert main(["verify", "--suite", "chain"]) == EXIT_OK
    assert "suite=chain status=pass" in capsys.readouterr().out


def test_usage_errors(tmp_path, capsys):
    bad = [
        ["solve", "stereo", "--left", "a", "--right", "b", "--l1", "2",
         "--operator", "lrms"],
        ["solve", "stereo", "--left", "a", "--right", "b", "--composite"],
        ["solve", "stereo", "--left", "a", "--right", "b", "--iterations", "0"],
        ["solve", "motion", "--ref", "a"],
        ["bench", "--box", "10x4"],
        ["bench", "--box", "wide"],
        ["bench"],
    ]
    for argv in bad:
        assert main(argv) == EXIT_USAGE, argv
    capsys.readouterr()


def test_missing_image_is_io_error(tmp_path, capsys):
    code = main(["solve", "stereo", "--left", str(tmp_path / "no.ppm"),
                 "--right", str(tmp_path / "also-no.ppm")])
    assert code == EXIT_IO
    assert "error:" in capsys.readouterr().err


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert "gridmrf" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gridmrf.cli", "--version"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "gridmrf" in proc.stdout
