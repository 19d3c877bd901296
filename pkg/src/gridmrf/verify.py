"""Golden-file suites: committed oracle results and the live cross-checks
that gate every release.

Golden files are versioned line-oriented text: a `# gridmrf golden <suite> v1`
header, then one `key=value ...` record per line.  They are written once by
scripts/make_golden.py (which runs the expensive enumerations) and read back
by the verify suites and the test-suite, which re-run only the fast engines.
"""

from importlib import resources

import numpy as np

from . import edp, minplus, oracle, scanline
from .model import (
    CostVolume,
    DisparityField,
    EdgeWeights,
    LabelSpace,
    SmoothnessModel,
    evaluate_energy,
    stereo_labels,
)

GOLDEN_VERSIONS = {"tiny": 1, "chain": 1}


def golden_path(suite):
    return resources.files("gridmrf") / "golden" / f"{suite}.txt"


def _format_record(rec):
    parts = []
    for key, val in rec.items():
        if isinstance(val, (list, tuple, np.ndarray)):
            val = ",".join(str(int(x)) for x in np.asarray(val).reshape(-1))
        parts.append(f"{key}={val}")
    return " ".join(parts)


def _parse_record(line):
    rec = {}
    for part in line.split():
        key, _, val = part.partition("=")
        rec[key] = val
    return rec


def write_golden(suite, records, path):
    with open(path, "w") as f:
        f.write(f"# gridmrf golden {suite} v{GOLDEN_VERSIONS[suite]}\n")
        for rec in records:
            f.write(_format_record(rec) + "\n")


def load_golden(suite):
    path = golden_path(suite)
    with path.open() as f:
        header = f.readline().strip()
        expect = f"# gridmrf golden {suite} v{GOLDEN_VERSIONS[suite]}"
        if header != expect:
            raise ValueError(f"{path}: bad golden header {header!r}")
        return [_parse_record(line) for line in f if line.strip()]


def make_tiny_records():
    """Run the exhaustive grid enumeration on the tiny suite (slow; done once
    before release) and pair it with the solver energy the ratio bound pins."""
    records = []
    for inst in oracle.tiny_suite():
        best, fld = oracle.oracle_grid(inst)
        _, trace = edp.solve(inst.volume, inst.model, 8, "sfms")
        records.append({
            "seed": inst.seed,
            "l1": inst.model.l1,
            "g": inst.model.g,
            "lam": inst.model.lam,
            "weighted": int(inst.model.weights is not None),
            "oracle": best,
            "edp8": trace.entries[-1].total,
            "field": fld,
        })
    return records


def make_chain_records():
    """Exhaustively enumerate the seeded chains (slow; done once)."""
    records = []
    for problem, seed in oracle.chain_suite():
        best, paths = oracle.oracle_chain(problem)
        unique = len(paths) == 1
        records.append({
            "seed": seed,
            "length": problem.length,
            "q": problem.space.count,
            "l1": problem.model.l1,
            "g": problem.model.g,
            "lam": problem.model.lam,
            "weighted": int(problem.weights is not None),
            "min": best,
            "unique": int(unique),
            "path": list(paths[0]) if unique else "-",
        })
    return records


def check_tiny():
    """Re-run the solver against the committed enumeration results."""
    failures = []
    try:
        records = load_golden("tiny")
    except (OSError, ValueError) as e:
        return [f"tiny: {e}"]
    instances = {inst.seed: inst for inst in oracle.tiny_suite()}
    for rec in records:
        seed = int(rec["seed"])
        inst = instances.get(seed)
        if inst is None:
            failures.append(f"tiny seed {seed}: unknown instance")
            continue
        if (int(rec["l1"]), int(rec["g"]), int(rec["lam"])) != (
                inst.model.l1, inst.model.g, inst.model.lam):
            failures.append(f"tiny seed {seed}: parameters diverge from the suite")
            continue
        oracle_min = int(rec["oracle"])
        committed = int(rec["edp8"])
        fld = np.array([int(x) for x in rec["field"].split(",")], dtype=np.int64)
        fld = fld.reshape(inst.volume.height, inst.volume.width)
        stored = evaluate_energy(inst.volume, inst.model, DisparityField(fld)).total
        if stored != oracle_min:
            failures.append(
                f"tiny seed {seed}: stored field energy {stored} != recorded minimum {oracle_min}")
            continue
        _, trace = edp.solve(inst.volume, inst.model, 8, "sfms")
        got = trace.entries[-1].total
        if got > committed:
            failures.append(
                f"tiny seed {seed}: energy {got} exceeds committed bound {committed} "
                f"(ratio {got / oracle_min:.4f} > {committed / oracle_min:.4f})")
    return failures


def check_chain():
    """Backtracked energies must equal the committed exhaustive minima; on
    unique-optimum chains the marginal argmin must equal the stored path."""
    failures = []
    try:
        records = load_golden("chain")
    except (OSError, ValueError) as e:
        return [f"chain: {e}"]
    problems = {seed: p for p, seed in oracle.chain_suite()}
    for rec in records:
        seed = int(rec["seed"])
        problem = problems.get(seed)
        if problem is None:
            failures.append(f"chain seed {seed}: unknown instance")
            continue
        want = int(rec["min"])
        sums, table = scanline.forward_pass(problem, "sfms")
        path, got = scanline.backtrack(sums, table)
        if got != want:
            failures.append(f"chain seed {seed}: backtracked energy {got} != {want}")
            continue
        if oracle.chain_energy(problem, path) != want:
            failures.append(f"chain seed {seed}: recovered path does not score {want}")
            continue
        if int(rec["unique"]):
            stored = [int(x) for x in rec["path"].split(",")]
            marg = scanline.bidirectional_marginals(problem, "sfms")
            tilde = scanline.marginal_argmin_solution(marg)
            if list(tilde) != stored:
                failures.append(
                    f"chain seed {seed}: marginal argmin {list(tilde)} != path {stored}")
    return failures


def check_minplus(slices=250, seed=4242):
    """Live operator equivalence sweep plus exhaustive-oracle agreement."""
    failures = []
    rng = np.random.default_rng(seed)
    for i in range(slices):
        if i % 2 == 0:
            q = int(rng.integers(2, 33))
            space = LabelSpace((0,), (q - 1,))
        else:
            n1 = int(rng.integers(2, 7))
            n2 = int(rng.integers(1, 7))
            space = LabelSpace((0, 0), (n1 - 1, n2 - 1))
        l1 = int(rng.integers(1, 3))
        model = SmoothnessModel(l1=l1, g=int(rng.integers(1, 9)),
                                lam=int(rng.integers(0, 10 ** 4)))
        w = int(rng.integers(1, 3))
        s = rng.integers(0, 10 ** 6, space.count).astype(np.int64)
        ref = minplus.apply_sfms(s, space, model, w)
        got = minplus.apply_grms(s, space, model, w)
        if not np.array_equal(ref, got):
            failures.append(f"minplus slice {i}: grms diverges from sfms at "
                            f"index {int(np.argmax(ref != got))}")
            break
        if l1 == 1:
            got = minplus.apply_lrms(s, space, model, w)
            if not np.array_equal(ref, got):
                failures.append(f"minplus slice {i}: lrms diverges from sfms at "
                                f"index {int(np.argmax(ref != got))}")
                break
        if i % 10 == 0:
            want = oracle.oracle_minplus(s, space, model, w)
            if not np.array_equal(ref, want):
                failures.append(f"minplus slice {i}: sfms diverges from the oracle")
                break
    return failures


def check_edp(seeds=(7, 8)):
    """Live bit-equality of edp_pass against the literal interpreter."""
    failures = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        volume = CostVolume(rng.integers(0, 30, (3, 3, 2)).astype(np.int64),
                            stereo_labels(1), 40)
        for weighted in (False, True):
            weights = None
            if weighted:
                weights = EdgeWeights(rng.integers(1, 3, (3, 2)).astype(np.int64),
                                      rng.integers(1, 3, (2, 3)).astype(np.int64))
            model = SmoothnessModel(l1=1, g=1, lam=int(rng.integers(1, 6)),
                                    weights=weights)
            fast = edp.DirectionSums.zeros(3, 3, 2)
            slow = edp.DirectionSums.zeros(3, 3, 2)
            for it in range(2):
                for order in edp.SCAN_ORDERS:
                    edp.edp_pass(fast, volume, model, order, "sfms")
                    slow = oracle.oracle_edp_step(slow, volume, model, order)
                    if not np.array_equal(fast.data, slow.data):
                        k, y, x, v = np.unravel_index(
                            int(np.argmax(fast.data != slow.data)), fast.data.shape)
                        failures.append(
                            f"edp seed {seed} pass {order.name} iter {it}: "
                            f"sums[{k},{y},{x},{v}] {fast.data[k, y, x, v]} != "
                            f"{slow.data[k, y, x, v]}")
                        return failures
    return failures


SUITES = {
    "minplus": check_minplus,
    "chain": check_chain,
    "tiny": check_tiny,
    "edp": check_edp,
}


def run_suites(names):
    """Run named suites; returns {suite: [failure, ...]}."""
    return {name: SUITES[name]() for name in names}
