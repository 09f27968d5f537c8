"""Acceptance suite: one test per release criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s` to see the PASS/FAIL lines.
"""

import math
import time
from collections import deque

import numpy as np

from cutsim.calib import MarkerPair, fit_calibration, pixel_to_robot
from cutsim.config import RunConfig
from cutsim.contact import (
    ConfusionStats,
    SplitScheme,
    build_split,
    evaluate,
    label_approaching,
    make_corpus,
    preprocess,
    train_forest,
)
from cutsim.control import ControllerConfig, PlantModel, simulate_tracking
from cutsim.harness import (
    MeatSpec,
    compare_fat_removal,
    consistency_report,
    generate_scene,
    random_meat_spec,
    run_pipeline,
)
from cutsim.planner import (
    CutMotionProfile,
    CutPlan,
    Task,
    lift_to_3d,
    plan_trim,
    squish_e,
)
from cutsim.vision import BoardRegion, Scene, color_mask, segment_scene
from cutsim.workspace import RobotState, SafeRegion, clamp_waypoint, gate_step


def report(name: str, ok: bool, detail: str):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


# --- 1. calibration round-trip -------------------------------------------------

def test_calibration_roundtrip():
    rng = np.random.default_rng(2024)
    fit_points = [(0.0, 0.0), (640.0, 0.0), (640.0, 480.0), (0.0, 480.0), (320.0, 240.0)]
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        theta0 = rng.uniform(-math.pi, math.pi)
        s1, s2 = rng.uniform(1e-4, 1.0, 2)
        dx, dy = rng.uniform(-1.0, 1.0, 2)
        c, s = math.cos(theta0), math.sin(theta0)
        T = np.array([[s1 * c, -s2 * s], [s1 * s, s2 * c]])
        delta = np.array([dx, dy])
        pairs = [MarkerPair(tuple(T @ np.array(p) - delta), p) for p in fit_points]
        params = fit_calibration(pairs)
        held_out = rng.uniform(0.0, 640.0, size=(20, 2))
        expected = held_out @ T.T - delta
        err = np.linalg.norm(pixel_to_robot(params, held_out) - expected, axis=1).max()
        worst = max(worst, float(err))
    elapsed = time.perf_counter() - t0
    report(
        "calibration round-trip",
        worst < 1e-6 and elapsed < 5.0,
        f"max held-out error {worst:.2e} m (<1e-6), {elapsed:.2f}s (<5s)",
    )


# --- 2. safety soundness --------------------------------------------------------

def test_safety_soundness():
    rng = np.random.default_rng(7)
    violations = 0
    non_idempotent = 0
    for _ in range(100):  # 100 regions x 100 points = 10^4 clamps
        lo = rng.uniform(-2, 0, 3)
        hi = lo + rng.uniform(0.1, 2, 3)
        region = SafeRegion(lo[0], hi[0], lo[1], hi[1], lo[2], hi[2])
        pts = rng.uniform(-4, 4, size=(100, 3))
        for p in pts:
            q = clamp_waypoint(region, p)
            if not region.contains(*q):
                violations += 1
            if not np.array_equal(clamp_waypoint(region, q), q):
                non_idempotent += 1

    region = SafeRegion(-0.5, 0.5, -0.4, 0.4, 0.0, 0.3)
    outside = 0
    steps = 0
    for walk in range(100):  # 100 walks x 100 steps = 10^4 gated commands
        state = RobotState(0.0, 0.0, 0.1)
        for _ in range(100):
            d = rng.normal(scale=0.3, size=3)
            proposed = RobotState(state.x + d[0], state.y + d[1], state.z + d[2])
            state = gate_step(region, state, proposed).state
            steps += 1
            if not region.contains(state.x, state.y, state.z):
                outside += 1
    report(
        "safety soundness",
        violations == 0 and non_idempotent == 0 and outside == 0,
        f"10^4 clamps: {violations} violations, {non_idempotent} non-idempotent; "
        f"{steps} gated steps: {outside} escapes",
    )


# --- 3. tracking accuracy -------------------------------------------------------

def test_tracking_accuracy():
    region = SafeRegion(-0.5, 0.5, -0.5, 0.5, 0.0, 0.3)
    profile = CutMotionProfile()
    cfg = ControllerConfig()
    plant = PlantModel(command_noise_sigma=0.001)
    xs = np.linspace(-0.08, 0.08, 30)
    curve = np.column_stack([xs, 0.03 * np.sin(xs / 0.16 * 2 * math.pi)])
    motions = {
        "horizontal": CutPlan([np.array([[-0.10, 0.0], [0.10, 0.0]])], Task.POINT_TO_POINT),
        "vertical": CutPlan([np.array([[0.0, -0.10], [0.0, 0.10]])], Task.POINT_TO_POINT),
        "trim": plan_trim(curve, squish_bound=0.002),
    }
    t0 = time.perf_counter()
    results = {}
    for name, plan in motions.items():
        means, maxes = [], []
        for trial in range(3):
            traj = lift_to_3d(plan, profile, region)
            r = simulate_tracking(traj, cfg, plant, region, seed=trial)
            means.append(r.mean_error)
            maxes.append(r.max_error)
        results[name] = (float(np.mean(means)), float(np.max(maxes)))
    elapsed = time.perf_counter() - t0
    ok = all(m < 0.0025 and x < 0.005 for m, x in results.values()) and elapsed < 30.0
    detail = ", ".join(
        f"{k}: mean {m * 1000:.2f}mm max {x * 1000:.2f}mm" for k, (m, x) in results.items()
    )
    report("tracking accuracy", ok, f"{detail} (<2.5mm mean, <5mm max), {elapsed:.1f}s (<30s)")


# --- 4. SQUISH-E contract -------------------------------------------------------

def _deviations(original, simplified):
    orig = np.asarray(original)
    kept = []
    j = 0
    for i, p in enumerate(orig):
        if j < len(simplified) and np.array_equal(p, simplified[j]):
            kept.append(i)
            j += 1
    assert j == len(simplified)
    kept = np.array(kept)
    out = []
    for k in range(len(orig)):
        if k in kept:
            continue
        i = kept[kept < k].max()
        jj = kept[kept > k].min()
        ref = ((jj - k) * orig[i] + (k - i) * orig[jj]) / (jj - i)
        out.append(float(np.linalg.norm(orig[k] - ref)))
    return out


def test_squish_e_contract():
    rng = np.random.default_rng(99)
    bad_bound = 0
    bad_monotone = 0
    for _ in range(1000):
        n = int(rng.integers(2, 50))
        pts = np.cumsum(rng.normal(size=(n, 2)), axis=0)
        bound = float(rng.uniform(0.0, 4.0))
        out = squish_e(pts, bound)
        if any(d > bound + 1e-9 for d in _deviations(pts, out)):
            bad_bound += 1
        if len(squish_e(pts, bound * 3 + 0.05)) > len(out):
            bad_monotone += 1
    collinear = np.array([[float(i), float(i)] for i in range(9)])
    collinear_ok = len(squish_e(collinear, 0.0)) == 2
    spaced = np.column_stack([np.cumsum(rng.uniform(0.5, 3.0, 12)), np.zeros(12)])
    large_ok = len(squish_e(spaced, 1e9)) == 2
    report(
        "SQUISH-E contract",
        bad_bound == 0 and bad_monotone == 0 and collinear_ok and large_ok,
        f"1000 polylines: {bad_bound} bound violations, {bad_monotone} monotonicity "
        f"violations; collinear->2: {collinear_ok}; huge-bound->2: {large_ok}",
    )


# --- 5. segmentation oracle equivalence ------------------------------------------

def _flood_components(mask):
    h, w = mask.shape
    seen = np.zeros_like(mask, bool)
    comps = []
    for r in range(h):
        for c in range(w):
            if mask[r, c] and not seen[r, c]:
                comp = set()
                q = deque([(r, c)])
                seen[r, c] = True
                while q:
                    cr, cc = q.popleft()
                    comp.add((cr, cc))
                    for dr in (-1, 0, 1):
                        for dc in (-1, 0, 1):
                            nr, nc = cr + dr, cc + dc
                            if 0 <= nr < h and 0 <= nc < w and mask[nr, nc] and not seen[nr, nc]:
                                seen[nr, nc] = True
                                q.append((nr, nc))
                comps.append(comp)
    return comps


def _boundary(comp_set, mask_shape):
    out = set()
    for r, c in comp_set:
        for dr, dc in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            if (r + dr, c + dc) not in comp_set:
                out.add((r, c))
                break
    return out


def test_segmentation_oracle_equivalence():
    rng = np.random.default_rng(41)
    mismatches = 0
    invariance_failures = 0
    for _ in range(100):
        px = np.zeros((90, 120, 3), np.uint8)
        px[:, :] = (10, 10, 10)
        for _ in range(int(rng.integers(1, 4))):
            r0, c0 = rng.integers(8, 50), rng.integers(8, 70)
            hh, ww = rng.integers(4, 30), rng.integers(4, 40)
            px[r0 : r0 + hh, c0 : c0 + ww] = (200, 30, 30)
        scene = Scene(px.copy(), BoardRegion(5, 5, 115, 85))
        seg = segment_scene(scene)
        mask = color_mask(scene, (120, 0, 0), (255, 100, 100))
        comps = _flood_components(mask)
        best = max(comps, key=len)
        traced = {(y, x) for x, y in seg.meat_contour}
        if seg.meat_area != len(best) or traced != _boundary(best, mask.shape):
            mismatches += 1
        noisy = px.copy()
        noisy[:5, :] = rng.integers(0, 256, (5, 120, 3))
        noisy[-5:, :] = rng.integers(0, 256, (5, 120, 3))
        noisy[:, :5] = rng.integers(0, 256, (90, 5, 3))
        noisy[:, -5:] = rng.integers(0, 256, (90, 5, 3))
        seg2 = segment_scene(Scene(noisy, scene.board))
        if seg2.meat_area != seg.meat_area or not np.array_equal(
            seg2.meat_contour, seg.meat_contour
        ):
            invariance_failures += 1
    report(
        "segmentation oracle equivalence",
        mismatches == 0 and invariance_failures == 0,
        f"100 planted scenes: {mismatches} oracle mismatches, "
        f"{invariance_failures} exterior-invariance failures",
    )


# --- 6. error-rate formula and synthetic-corpus reproduction ---------------------

REFERENCE_ROWS = [  # (fp, fn, total, reported_percent) from instrumented-knife trials
    (86, 168, 13670, 1.86),
    (143, 300, 11998, 3.69),
    (236, 328, 18779, 3.00),
    (30, 304, 8123, 4.11),
    (147, 79, 11948, 1.89),
    (826, 779, 16769, 9.57),
    (802, 1148, 44090, 4.42),
]


def _pooled_error(protocol, groups, n_trees, seed=0):
    total = ConfusionStats(0, 0, 0, 0)
    for _, group in sorted(groups.items()):
        tr, te = build_split(group, SplitScheme(protocol, seed=seed))
        model = train_forest(tr, n_trees=n_trees, mtry=4, seed=seed, keep_bootstrap=False)
        total = total + evaluate(model, te)
    return total


def _by_type(reps):
    groups = {}
    for r in reps:
        groups.setdefault(r.cut_type, []).append(r)
    return groups


def test_error_rates_and_synthetic_corpus():
    formula_ok = all(
        abs(ConfusionStats(0, fp, total - fp - fn, fn).error_rate * 100 - pct) < 0.005
        for fp, fn, total, pct in REFERENCE_ROWS
    )

    t0 = time.perf_counter()
    corpus = make_corpus(replicates_per_type=9, n_samples=1462, drift=0.15, seed=7)
    n_samples = sum(len(r) for r in corpus)
    reps, _ = preprocess(corpus)
    groups = _by_type(reps)
    swt = _pooled_error("swt", groups, n_trees=500)
    approaching = _pooled_error(
        "swt", {k: [label_approaching(r) for r in v] for k, v in groups.items()}, n_trees=500
    )

    drifted, _ = preprocess(make_corpus(replicates_per_type=6, n_samples=800, drift=1.0, seed=17))
    dgroups = _by_type(drifted)
    swt_d = _pooled_error("swt", dgroups, n_trees=500)
    rwt_d = _pooled_error("rwt", dgroups, n_trees=500)
    elapsed = time.perf_counter() - t0

    ok = (
        formula_ok
        and swt.error_rate < 0.03
        and approaching.error_rate < 0.005
        and rwt_d.error_rate >= swt_d.error_rate
        and elapsed < 120.0
    )
    report(
        "error-rate formula and synthetic corpus",
        ok,
        f"reference rows reproduce: {formula_ok}; corpus {n_samples} samples: "
        f"SWT {swt.error_rate * 100:.2f}% (<3), approaching "
        f"{approaching.error_rate * 100:.3f}% (<0.5); drift: RWT "
        f"{rwt_d.error_rate * 100:.2f}% >= SWT {swt_d.error_rate * 100:.2f}%; "
        f"{elapsed:.0f}s (<120s)",
    )


# --- 7. pipeline conservation and consistency -------------------------------------

def test_pipeline_conservation_and_consistency():
    rect_config = RunConfig.from_ini(
        "[planner]\nn_slices = 4\n"
        "[harness]\nfat_removal = none\nplan_source = truth\n"
        "[control]\ncommand_noise_sigma = 0.0\n"
    )
    rect = MeatSpec(center_cm=(20.0, 13.0), radius_x_cm=12.0, radius_y_cm=6.0,
                    shape="rect", fat_base_cm=0.0)
    scene, truth = generate_scene(rect)
    rect_log = run_pipeline(scene, truth, rect_config)
    rect_rep = consistency_report(rect_log)
    rect_ok = (
        rect_rep.slice_thickness_cm.n == 4
        and rect_rep.slice_thickness_cm.variance < 1e-16
        and rect_rep.slice_weight_g.variance < 1e-16
    )

    config = RunConfig.default()
    worst_rel = 0.0
    cube_fracs = []
    for seed in (5, 6, 7):
        scene, truth = generate_scene(random_meat_spec(seed))
        log = run_pipeline(scene, truth, config)
        meat = sum(p.area_cm2 for p in log.pieces if p.kind == "meat" and p.final)
        fat = sum(p.area_cm2 for p in log.pieces if p.kind == "fat" and p.final)
        worst_rel = max(
            worst_rel,
            abs(meat - truth.meat_area_cm2) / truth.meat_area_cm2,
            abs(fat - truth.fat_area_cm2) / max(truth.fat_area_cm2, 1e-9),
        )
        cube_fracs.append(consistency_report(log).cube_side_fraction)

    ok = rect_ok and worst_rel < 1e-9
    report(
        "pipeline conservation and consistency",
        ok,
        f"rect N=4 variance: thickness {rect_rep.slice_thickness_cm.variance:.1e}, "
        f"weight {rect_rep.slice_weight_g.variance:.1e} (=0); corpus conservation "
        f"worst {worst_rel:.1e} (<1e-9); cube-side fraction in [2.5, 3.5] cm: "
        f"{', '.join(f'{f:.0%}' for f in cube_fracs)} (reported)",
    )


# --- 8. scripted point-to-point vs trim -------------------------------------------

def test_trim_removes_less_meat_than_p2p():
    config = RunConfig.from_ini("[control]\ncommand_noise_sigma = 0.0\n")
    wins = 0
    pairs = []
    for seed in range(100, 110):
        scene, truth = generate_scene(random_meat_spec(seed))
        trim, p2p = compare_fat_removal(scene, truth, config, seed=seed)
        pairs.append((trim.meat_removed_g, p2p.meat_removed_g))
        wins += trim.meat_removed_g < p2p.meat_removed_g
    mean_trim = np.mean([t for t, _ in pairs])
    mean_p2p = np.mean([p for _, p in pairs])
    report(
        "scripted point-to-point vs trim",
        wins == len(pairs),
        f"trim < p2p meat removed on {wins}/{len(pairs)} scenes "
        f"(means {mean_trim:.1f}g vs {mean_p2p:.1f}g)",
    )
