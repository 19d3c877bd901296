"""Command-line front end: solve stereo/motion scenes, benchmark the
operators, and verify the golden suites.

Every run echoes its fully materialized configuration as KEY=VALUE lines on
stderr, so a run is reproducible from its log.  Exit codes: 0 success,
1 verification or regression failure, 2 usage error, 3 I/O error.
"""

import argparse
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

from . import __version__
from .bench import BenchMismatch, bench_operators
from .dsi import MatchConfig, build_composite_cost, build_cost_volume, build_edge_weights, estimate_lambda
from .edp import EnergyTrace, solve as edp_solve
from .media import MediaError, read_image, render_flow_hsv, write_disparity, write_energy_log, write_flow, write_image
from .model import SmoothnessModel, motion_labels, stereo_labels
from .report import save_bench_figure, save_energy_figure
from .scanline import solve_rows
from .verify import SUITES, run_suites

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_IO = 3


@dataclass
class RunConfig:
    """Materialized solve parameters; echoed verbatim to stderr."""

    mode: str
    images: tuple
    max_disp: int | None
    max_vx: int | None
    max_vy: int | None
    labels: int
    l1: int
    l2: int
    g: int
    lam: int
    iterations: int
    algo: str
    operator: str
    composite: bool
    adaptive_weights: bool
    window_scale: float
    scale: int
    renormalize: bool
    out_dir: str


def echo_config(cfg, stream=None):
    # bind the stream late so redirections of sys.stderr are honoured
    if stream is None:
        stream = sys.stderr
    for f in fields(cfg):
        val = getattr(cfg, f.name)
        if isinstance(val, tuple):
            val = ";".join(str(v) for v in val)
        print(f"{f.name.upper()}={val}", file=stream)


def _label_space(args):
    if args.mode == "stereo":
        return stereo_labels(args.max_disp)
    return motion_labels(args.max_vx, args.max_vy)


def _build_volume(args, space, images):
    cfg = MatchConfig(l2=args.l2, space=space, composite=args.composite)
    if args.mode == "stereo":
        if args.composite:
            middle, left, right = images
            # +v samples toward the left camera, -v toward the right one
            return middle, build_composite_cost(middle, left, right, cfg)
        right, left = images[0], images[1]
        return right, build_cost_volume(right, left, cfg)
    if args.composite:
        middle, nxt, prev = images
        return middle, build_composite_cost(middle, nxt, prev, cfg)
    ref, nxt = images[0], images[1]
    return ref, build_cost_volume(ref, nxt, cfg)


def run_solve(args):
    try:
        if args.mode == "stereo":
            paths = [args.middle, args.left, args.right] if args.composite \
                else [args.right, args.left]
        else:
            paths = [args.ref, args.next, args.prev] if args.composite \
                else [args.ref, args.next]
        images = [read_image(p) for p in paths]
    except (OSError, MediaError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO

    space = _label_space(args)
    ref, volume = _build_volume(args, space, images)
    lam = args.lam if args.lam is not None else estimate_lambda(volume, args.l1, args.l2, args.g)
    weights = build_edge_weights(ref) if args.adaptive_weights else None
    model = SmoothnessModel(l1=args.l1, g=args.g, lam=lam, weights=weights)

    cfg = RunConfig(
        mode=args.mode, images=tuple(paths),
        max_disp=getattr(args, "max_disp", None),
        max_vx=getattr(args, "max_vx", None),
        max_vy=getattr(args, "max_vy", None),
        labels=space.count, l1=args.l1, l2=args.l2, g=args.g, lam=lam,
        iterations=args.iterations, algo=args.algo, operator=args.operator,
        composite=args.composite, adaptive_weights=args.adaptive_weights,
        window_scale=args.window_scale, scale=args.scale,
        renormalize=args.renormalize, out_dir=str(args.out_dir),
    )
    echo_config(cfg)

    if args.algo == "edp":
        field, trace = edp_solve(volume, model, args.iterations, args.operator,
                                 args.window_scale, args.scale, args.renormalize)
    else:
        t0 = time.perf_counter()
        field, breakdown = solve_rows(volume, model, args.operator, args.window_scale)
        trace = EnergyTrace([breakdown], [time.perf_counter() - t0])

    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.mode == "stereo":
            write_disparity(field, space, out / "disparity.pgm", "pgm8")
            write_disparity(field, space, out / "disparity.pfm", "pfm")
        else:
            write_flow(field, space, out / "flow.flo")
            write_image(render_flow_hsv(field, space), out / "flow.ppm")
        write_energy_log(trace, out / "energy.csv")
        save_energy_figure(trace.entries, volume.pixel_count, out / "energy.png")
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO

    final = trace.entries[-1]
    print(f"per_pixel_energy={float(final.per_pixel):.2f}")
    print(f"total_energy={final.total}")
    return EXIT_OK


def run_bench(args):
    if args.box:
        try:
            n1, n2 = (int(t) for t in args.box.split("x"))
        except ValueError:
            print("error: --box must look like 27x15", file=sys.stderr)
            return EXIT_USAGE
        if n1 < 1 or n2 < 1 or n1 % 2 == 0 or n2 % 2 == 0:
            print("error: --box sides must be odd (symmetric ranges)", file=sys.stderr)
            return EXIT_USAGE
        space = motion_labels(n1 // 2, n2 // 2)
    else:
        space = stereo_labels(args.labels - 1)
    model = SmoothnessModel(l1=args.l1, g=args.g, lam=args.lam)
    print(f"LABELS={space.count}", file=sys.stderr)
    print(f"L1={args.l1}", file=sys.stderr)
    print(f"G={args.g}", file=sys.stderr)
    print(f"LAM={args.lam}", file=sys.stderr)
    print(f"TRIALS={args.trials}", file=sys.stderr)
    print(f"SEED={args.seed}", file=sys.stderr)
    try:
        rows = bench_operators(space, model, args.trials, args.seed,
                               window_scale=args.window_scale)
    except BenchMismatch as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VERIFY
    for row in rows:
        print(f"operator={row.operator} per_vertex={row.per_vertex} "
              f"vertices_per_second={row.vertices_per_second:.0f} "
              f"seconds={row.seconds:.6f}")
    by_kind = {row.operator: row for row in rows}
    if "lrms" in by_kind and "sfms" in by_kind:
        ratio = by_kind["lrms"].vertices_per_second / by_kind["sfms"].vertices_per_second
        print(f"speedup_lrms_over_sfms={ratio:.2f}")
    if args.out_figure and rows:
        try:
            save_bench_figure(rows, args.out_figure)
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def run_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = run_suites(names)
    bad = False
    for name in names:
        failures = results[name]
        if failures:
            bad = True
            print(f"suite={name} status=fail first=\"{failures[0]}\"")
        else:
            print(f"suite={name} status=pass")
    return EXIT_VERIFY if bad else EXIT_OK


def _add_solve_parser(sub):
    p = sub.add_parser("solve", help="build a cost volume and minimize its energy")
    modes = p.add_subparsers(dest="mode", required=True)

    st = modes.add_parser("stereo", help="rectified pair or triplet, labels shift along x")
    st.add_argument("--left", required=True, help="left image (matched at +v)")
    st.add_argument("--right", required=True, help="right image (the reference in pair mode)")
    st.add_argument("--middle", help="middle image; reference in composite mode")
    st.add_argument("--max-disp", type=int, default=59)
    _common_solve_args(st, default_g=5)

    mo = modes.add_parser("motion", help="frame pair or triplet, labels shift along x and y")
    mo.add_argument("--ref", required=True, help="reference frame")
    mo.add_argument("--next", required=True, help="next frame (matched at +v)")
    mo.add_argument("--prev", help="previous frame (matched at -v in composite mode)")
    mo.add_argument("--max-vx", type=int, default=13)
    mo.add_argument("--max-vy", type=int, default=7)
    _common_solve_args(mo, default_g=3)
    return p


def _common_solve_args(p, default_g):
    p.add_argument("--l1", type=int, choices=(1, 2), default=1, help="prior exponent")
    p.add_argument("--l2", type=int, choices=(1, 2), default=2, help="cost exponent")
    p.add_argument("--g", type=int, default=default_g, help="truncation threshold")
    p.add_argument("--lambda", dest="lam", type=int, default=None,
                   help="smoothness penalty; default: estimated from the mean cost")
    p.add_argument("--iterations", type=int, default=8)
    p.add_argument("--algo", choices=("edp", "scanline"), default="edp")
    p.add_argument("--operator", choices=("sfms", "grms", "lrms"), default="lrms")
    p.add_argument("--composite", action="store_true",
                   help="triplet mode: min of forward and mirrored backward costs")
    p.add_argument("--adaptive-weights", action="store_true",
                   help="double the penalty on low-gradient edges")
    p.add_argument("--window-scale", type=float, default=1.0)
    p.add_argument("--scale", type=int, default=2, help="fixed-point scale applied at entry")
    p.add_argument("--renormalize", action="store_true",
                   help="subtract per-pixel slice minima from the direction sums")
    p.add_argument("--out-dir", default=".", help="artifact directory")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gridmrf",
        description="discrete pairwise MRF energy minimization on image grids",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_solve_parser(sub)

    b = sub.add_parser("bench", help="operator throughput and op-count report")
    geom = b.add_mutually_exclusive_group(required=True)
    geom.add_argument("--labels", type=int, help="1D label count (range 0..N-1)")
    geom.add_argument("--box", help="2D label box as N1xN2 (odd sides, symmetric ranges)")
    b.add_argument("--l1", type=int, choices=(1, 2), default=1)
    b.add_argument("--g", type=int, default=5)
    b.add_argument("--lambda", dest="lam", type=int, default=10)
    b.add_argument("--trials", type=int, default=20000, help="slice applications per operator")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--window-scale", type=float, default=1.0)
    b.add_argument("--out-figure", help="write a throughput figure here")

    v = sub.add_parser("verify", help="run the golden-file suites")
    v.add_argument("--suite", choices=["all"] + sorted(SUITES), default="all")
    return parser


def _validate(args, parser):
    if args.command == "solve":
        if args.operator == "lrms" and args.l1 != 1:
            parser.error("operator lrms requires --l1 1")
        if args.mode == "stereo" and args.composite and not args.middle:
            parser.error("--composite requires --middle")
        if args.mode == "motion" and args.composite and not args.prev:
            parser.error("--composite requires --prev")
        if args.iterations < 1:
            parser.error("--iterations must be >= 1")
        if args.mode == "stereo" and args.max_disp < 0:
            parser.error("--max-disp must be >= 0")
        if args.mode == "motion" and (args.max_vx < 0 or args.max_vy < 0):
            parser.error("--max-vx/--max-vy must be >= 0")
        if args.g < 1:
            parser.error("--g must be >= 1")
        if args.window_scale < 1:
            parser.error("--window-scale must be >= 1")
        if args.scale < 1:
            parser.error("--scale must be >= 1")
    elif args.command == "bench":
        if args.labels is not None and args.labels < 2:
            parser.error("--labels must be >= 2")
        if args.trials < 0:
            parser.error("--trials must be >= 0")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _validate(args, parser)
    except SystemExit as e:
        return e.code if e.code is not None else EXIT_USAGE
    if args.command == "solve":
        return run_solve(args)
    if args.command == "bench":
        return run_bench(args)
    return run_verify(args)


if __name__ == "__main__":
    sys.exit(main())
