"""Command-line interface.

Subcommands mirror the pipeline stages: calibrate, segment, plan, simulate,
pipeline, contact-train, contact-eval, serve, demo.  Global flags --config,
--seed, and --out apply to every subcommand.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import calib as calib_mod
from .config import RunConfig
from .contact import (
    ConfusionStats,
    SplitScheme,
    build_split,
    evaluate,
    ingest_replicates,
    label_approaching,
    load_model,
    preprocess,
    save_model,
    train_forest,
    tune_mtry,
)
from .control import simulate_tracking
from .planner import (
    PlanSpec,
    Task,
    lift_to_3d,
    plan_point_to_point,
    plan_slices,
    plan_trim,
    trajectory_from_text,
    trajectory_to_text,
)
from .vision import (
    Scene,
    fat_meat_interface,
    read_ppm,
    segment_scene,
    segmentation_to_text,
)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cutsim", description=__doc__)
    p.add_argument("--config", help="INI config file (defaults built in)")
    p.add_argument("--seed", type=int, help="override harness/contact seed")
    p.add_argument("--out", default=".", help="output directory")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("calibrate", help="fit pixel-to-robot mapping from a marker-pair table")
    c.add_argument("pairs", help="text file: one 'rx ry cx cy' line per marker")

    s = sub.add_parser("segment", help="segment a PPM scene into meat/fat/markers")
    s.add_argument("scene", help="binary PPM (P6) file")
    s.add_argument("--border", type=int, default=0, help="pixels to ignore around the edge")

    pl = sub.add_parser("plan", help="plan cuts from a segmentation")
    pl.add_argument("scene", help="binary PPM (P6) file")
    pl.add_argument("--border", type=int, default=0, help="pixels to ignore around the edge")
    pl.add_argument("--task", choices=["slice", "trim", "p2p"], required=True)
    pl.add_argument("--params", help="calibration params file (key=value)")
    pl.add_argument("--n", type=int, default=0, help="piece count for slicing")
    pl.add_argument("--markers", help="p2p markers as 'x1,y1 x2,y2' in meters")

    sim = sub.add_parser("simulate", help="track a waypoint file and report error")
    sim.add_argument("waypoints", help="trajectory text file (t x y z phi lines)")

    pipe = sub.add_parser("pipeline", help="full slice/trim/cube run on a synthetic loin")

    ct = sub.add_parser("contact-train", help="train the contact forest from sensor CSVs")
    ct.add_argument("data", nargs="+", help="sensor CSV files")
    ct.add_argument("--task", choices=["contact", "approaching"], default="contact")
    ct.add_argument("--model", default="forest.json", help="output model path")

    ce = sub.add_parser("contact-eval", help="evaluate a trained model on sensor CSVs")
    ce.add_argument("data", nargs="+", help="sensor CSV files")
    ce.add_argument("--model", required=True)
    ce.add_argument("--task", choices=["contact", "approaching"], default="contact")

    sv = sub.add_parser("serve", help="run the point-to-point HTTP service")
    sv.add_argument("--port", type=int, default=8732)
    sv.add_argument("--ui", help="static asset directory for the operator console")

    sub.add_parser("demo", help="generate a scene, run the pipeline, print the report")
    return p


def _load_config(args) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig.default()
    if args.seed is not None:
        config.parser["harness"]["seed"] = str(args.seed)
        config.parser["contact"]["seed"] = str(args.seed)
    return config


def _cmd_calibrate(args, config):
    with open(args.pairs) as f:
        pairs = calib_mod.read_pairs_text(f.read())
    params = calib_mod.fit_calibration(pairs)
    text = calib_mod.params_to_text(params)
    out = os.path.join(args.out, "calibration.txt")
    with open(out, "w") as f:
        f.write(text)
    print(text, end="")
    print(f"wrote {out}")


def _scene_from_args(args) -> Scene:
    px = read_ppm(args.scene)
    b = getattr(args, "border", 0)
    from .vision import BoardRegion

    h, w = px.shape[:2]
    return Scene(px, BoardRegion(b, b, w - b, h - b))


def _cmd_segment(args, config):
    seg = segment_scene(_scene_from_args(args), config.color_ranges())
    text = segmentation_to_text(seg)
    out = os.path.join(args.out, "segmentation.txt")
    with open(out, "w") as f:
        f.write(text)
    print(f"meat_area={seg.meat_area} fat_area={seg.fat_area} markers={len(seg.markers)}")
    print(f"wrote {out}")


def _cmd_plan(args, config):
    seg = segment_scene(_scene_from_args(args), config.color_ranges())
    if args.params:
        with open(args.params) as f:
            params = calib_mod.params_from_text(f.read())
    else:
        params = calib_mod.CalibrationParams(0.0, 0.001, 0.001, 0.0, 0.0)
    meat_robot = calib_mod.pixel_to_robot(params, seg.meat_contour.astype(float))

    if args.task == "slice":
        n = args.n or max(2, int(round((np.ptp(meat_robot[:, 0]) * 100) / 3.0)))
        plan = plan_slices(meat_robot, PlanSpec(Task.SLICE, n_pieces=n))
    elif args.task == "trim":
        iface = fat_meat_interface(seg, tol=config.getfloat("vision", "interface_tol_px"))
        pts = calib_mod.pixel_to_robot(params, iface.astype(float))
        plan = plan_trim(pts, config.getfloat("planner", "trim_bound_m"))
    else:
        if args.markers:
            a, b = (tuple(map(float, tok.split(","))) for tok in args.markers.split())
        elif len(seg.markers) == 2:
            a = calib_mod.pixel_to_robot(params, seg.markers[0])
            b = calib_mod.pixel_to_robot(params, seg.markers[1])
        else:
            sys.exit("p2p needs --markers or exactly two markers in the scene")
        plan = plan_point_to_point(a, b)

    traj = lift_to_3d(plan, config.profile(), config.region())
    out = os.path.join(args.out, f"plan_{args.task}.txt")
    with open(out, "w") as f:
        f.write(trajectory_to_text(traj))
    print(f"{len(plan.polylines)} polyline(s), {len(traj)} waypoints")
    print(f"wrote {out}")


def _cmd_simulate(args, config):
    with open(args.waypoints) as f:
        traj = trajectory_from_text(f.read())
    report = simulate_tracking(
        traj, config.controller(), config.plant(), config.region(),
        seed=config.getint("harness", "seed"),
    )
    out = os.path.join(args.out, "executed.txt")
    with open(out, "w") as f:
        f.write(trajectory_to_text(report.executed))
    print(f"mean_error_m={report.mean_error!r}")
    print(f"max_error_m={report.max_error!r}")
    print(f"held_steps={report.held_steps}")
    print(f"wrote {out}")


def _cmd_pipeline(args, config):
    from .harness import consistency_report, generate_scene, random_meat_spec, run_pipeline, save_runlog
    from .harness.pipeline import trim_accuracy

    seed = config.getint("harness", "seed")
    scene, truth = generate_scene(random_meat_spec(seed))
    log = run_pipeline(scene, truth, config)
    run_dir = save_runlog(log, os.path.join(args.out, config.get("harness", "out_dir")))
    rep = consistency_report(log, config.weight_band_g())
    print(f"run {log.run_id}: {log.n_slices} slices, {len(log.cuts)} cuts, "
          f"{sum(1 for p in log.pieces if p.stage == 'cube')} cubes")
    print(f"slice thickness mean={rep.slice_thickness_cm.mean:.2f} cm "
          f"var={rep.slice_thickness_cm.variance:.4f}")
    print(f"cube side fraction in [2.5, 3.5] cm: {rep.cube_side_fraction:.1%}")
    if log.trim_stats:
        ta = trim_accuracy(log)
        print(f"fat removal ({ta.mode}): meat removed mean {ta.meat_removed_g.mean:.2f} g")
    print(f"saved {run_dir}")


def _prepare_sets(files, task: str, scheme: SplitScheme):
    reps = ingest_replicates(files)
    reps, _ = preprocess(reps)
    if task == "approaching":
        reps = [label_approaching(r) for r in reps]
    return build_split(reps, scheme)


def _cmd_contact_train(args, config):
    scheme = SplitScheme(
        config.get("contact", "split"),
        config.getfloat("contact", "train_fraction"),
        config.getint("contact", "seed"),
    )
    train, test = _prepare_sets(args.data, args.task, scheme)
    mtry = config.getint("contact", "mtry")
    if mtry == 0:
        mtry = tune_mtry(train, seed=scheme.seed)
        print(f"tuned mtry={mtry}")
    model = train_forest(
        train,
        n_trees=config.getint("contact", "n_trees"),
        mtry=mtry,
        seed=config.getint("contact", "seed"),
    )
    path = os.path.join(args.out, args.model)
    save_model(model, path)
    stats = evaluate(model, test)
    _print_confusion(f"{scheme.kind} holdout", stats)
    print(f"wrote {path}")


def _cmd_contact_eval(args, config):
    model = load_model(args.model)
    scheme = SplitScheme(
        config.get("contact", "split"),
        config.getfloat("contact", "train_fraction"),
        config.getint("contact", "seed"),
    )
    _, test = _prepare_sets(args.data, args.task, scheme)
    _print_confusion(f"{scheme.kind} holdout", evaluate(model, test))


def _print_confusion(label: str, s: ConfusionStats):
    print("data        fp      fn      total   error_rate")
    print(f"{label:<10} {s.false_positives:<7} {s.false_negatives:<7} "
          f"{s.total:<7} {s.error_rate * 100:.2f}%")


def _cmd_serve(args, config):
    from .harness.service import serve

    serve(config, port=args.port, static_dir=args.ui)


def _cmd_demo(args, config):
    _cmd_pipeline(args, config)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    config = _load_config(args)
    os.makedirs(args.out, exist_ok=True)
    handlers = {
        "calibrate": _cmd_calibrate,
        "segment": _cmd_segment,
        "plan": _cmd_plan,
        "simulate": _cmd_simulate,
        "pipeline": _cmd_pipeline,
        "contact-train": _cmd_contact_train,
        "contact-eval": _cmd_contact_eval,
        "serve": _cmd_serve,
        "demo": _cmd_demo,
    }
    handlers[args.command](args, config)
    return 0


if __name__ == "__main__":
    sys.exit(main())
