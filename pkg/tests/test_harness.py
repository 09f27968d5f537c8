import math

import numpy as np
import pytest

from cutsim.config import RunConfig
from cutsim.harness import (
    BoardGeometry,
    MeatSpec,
    compare_fat_removal,
    consistency_report,
    generate_scene,
    load_runlog_text,
    proctor_markers,
    random_meat_spec,
    run_pipeline,
    save_runlog,
    trim_accuracy,
)
from cutsim.harness.pipeline import runlog_to_text
from cutsim.calib import pixel_to_robot
from cutsim.vision import segment_scene


QUIET = "[control]\ncommand_noise_sigma = 0.0\n"


def fast_config(extra=""):
    # coarser waypoints keep pipeline tests quick without changing semantics
    return RunConfig.from_ini(
        "[planner]\npause_spacing = 0.05\nperiod_T = 0.4\ntravel_speed = 0.2\n" + extra
    )


# --- scene generation ---------------------------------------------------------

def test_circle_area_within_one_percent():
    spec = MeatSpec(center_cm=(20.0, 15.0), radius_x_cm=10.0, radius_y_cm=10.0, fat_base_cm=0.0)
    scene, truth = generate_scene(spec)
    seg = segment_scene(scene)
    expected_px = math.pi * (10.0 * 10.0) ** 2  # r = 100 px
    assert abs(seg.meat_area - expected_px) / expected_px < 0.01
    assert truth.fat_polygon is None


def test_zero_fat_band_means_no_white_pixels():
    spec = MeatSpec(fat_base_cm=0.0)
    scene, _ = generate_scene(spec)
    seg = segment_scene(scene)
    assert seg.fat_contour is None and seg.fat_area == 0


def test_scene_deterministic_under_seed():
    spec = random_meat_spec(3)
    s1, _ = generate_scene(spec)
    s2, _ = generate_scene(spec)
    assert np.array_equal(s1.pixels, s2.pixels)


def test_blob_exceeding_board_rejected():
    spec = MeatSpec(center_cm=(38.0, 15.0), radius_x_cm=12.0)
    with pytest.raises(ValueError, match="board"):
        generate_scene(spec)


def test_true_calibration_maps_pixels_to_board():
    board = BoardGeometry()
    params = board.true_calibration()
    # pixel at the board origin corner maps to (0, 0) plus half a pixel
    p = pixel_to_robot(params, (board.margin_px, board.margin_px))
    assert np.allclose(p, [0.0005, 0.0005])


def test_markers_rendered_and_segmented():
    spec = MeatSpec(fat_base_cm=0.0)
    scene, _ = generate_scene(spec, markers=[(0.05, 0.25), (0.35, 0.25)])
    seg = segment_scene(scene)
    assert len(seg.markers) == 2


def test_interface_matches_fat_meat_boundary():
    from shapely.geometry import Point

    spec = MeatSpec()
    _, truth = generate_scene(spec)
    # every interface point lies on the meat boundary
    for p in truth.interface[:: len(truth.interface) // 10]:
        assert truth.meat_polygon.boundary.distance(Point(p)) < 1e-9


# --- pipeline -----------------------------------------------------------------

@pytest.fixture(scope="module")
def loin_run():
    spec = random_meat_spec(5)
    scene, truth = generate_scene(spec)
    config = fast_config()
    return run_pipeline(scene, truth, config), truth, config


def test_pipeline_conservation(loin_run):
    log, truth, _ = loin_run
    meat = sum(p.area_cm2 for p in log.pieces if p.kind == "meat" and p.final)
    fat = sum(p.area_cm2 for p in log.pieces if p.kind == "fat" and p.final)
    assert abs(meat - truth.meat_area_cm2) / truth.meat_area_cm2 < 1e-9
    assert abs(fat - truth.fat_area_cm2) / truth.fat_area_cm2 < 1e-9


def test_pipeline_produces_all_stages(loin_run):
    log, _, _ = loin_run
    stages = {p.stage for p in log.pieces}
    assert "slice" in stages and "cube" in stages and "trim_discard" in stages
    assert log.n_slices == len([p for p in log.pieces if p.stage == "slice"])
    assert len(log.trim_stats) > 0


def test_pipeline_weight_proxy(loin_run):
    log, truth, _ = loin_run
    for p in log.pieces:
        if p.kind == "meat":
            assert p.weight_g == pytest.approx(
                p.area_cm2 * truth.thickness_cm * truth.density_g_cm3
            )


def test_consistency_report_stats(loin_run):
    log, _, config = loin_run
    rep = consistency_report(log, config.weight_band_g())
    assert rep.slice_thickness_cm.n == log.n_slices
    assert rep.cube_length_cm.n == sum(1 for p in log.pieces if p.stage == "cube")
    assert 0.0 <= rep.cube_side_fraction <= 1.0
    assert rep.slice_weight_g.variance >= 0
    # direct statistics oracle
    widths = [p.length_cm for p in log.pieces if p.stage == "slice"]
    assert rep.slice_thickness_cm.mean == pytest.approx(np.mean(widths))
    assert rep.slice_thickness_cm.variance == pytest.approx(np.var(widths))


def test_rectangular_no_fat_zero_variance():
    config = RunConfig.from_ini(
        "[planner]\nn_slices = 4\npause_spacing = 0.05\nperiod_T = 0.4\ntravel_speed = 0.2\n"
        "[harness]\nfat_removal = none\nplan_source = truth\n"
        + QUIET
    )
    spec = MeatSpec(center_cm=(20.0, 13.0), radius_x_cm=12.0, radius_y_cm=6.0,
                    shape="rect", fat_base_cm=0.0)
    scene, truth = generate_scene(spec)
    log = run_pipeline(scene, truth, config)
    rep = consistency_report(log)
    assert rep.slice_thickness_cm.n == 4
    assert rep.slice_thickness_cm.variance < 1e-16
    assert rep.slice_weight_g.variance < 1e-16


def test_cut_exactly_on_interface_removes_no_meat():
    from cutsim.harness.pipeline import _split_polygon

    spec = MeatSpec(center_cm=(20.0, 12.0), radius_x_cm=10.0, radius_y_cm=5.0,
                    shape="rect", fat_base_cm=1.5, fat_span=0.98)
    _, truth = generate_scene(spec)
    y_top = truth.meat_polygon.bounds[3]
    path = np.array([[0.05, y_top], [0.35, y_top]])
    parts = _split_polygon(truth.meat_polygon, path)
    removed = sum(p.area for p in parts if p.bounds[1] > y_top - 1e-12)
    assert removed == 0.0


def test_vision_trim_removes_at_most_a_pixel_strip():
    # the traced contour runs through outermost meat pixel centers, so the
    # trim cut sits within one pixel (1 mm) of the true interface
    spec = MeatSpec(center_cm=(20.0, 12.0), radius_x_cm=10.0, radius_y_cm=5.0,
                    shape="rect", fat_base_cm=1.5, fat_span=0.98)
    scene, truth = generate_scene(spec)
    trim, _ = compare_fat_removal(scene, truth, fast_config(QUIET), seed=0)
    cut_len_cm = 20.0
    assert trim.meat_removed_cm2 <= cut_len_cm * 0.1 + 0.5
    assert trim.fat_removed_cm2 > 0.5 * truth.fat_area_cm2


def test_analytic_offset_cut():
    # cutting 1 cm into the meat along a straight interface of length L
    # removes L * 1 cm of meat area
    from cutsim.harness.pipeline import _split_polygon

    spec = MeatSpec(center_cm=(20.0, 12.0), radius_x_cm=10.0, radius_y_cm=5.0,
                    shape="rect", fat_base_cm=0.0)
    _, truth = generate_scene(spec)
    y_cut = 0.17 - 0.01  # 1 cm below the rectangle top edge
    path = np.array([[0.08, y_cut], [0.32, y_cut]])
    parts = _split_polygon(truth.meat_polygon, path)
    removed = sum(p.area for p in parts if p.bounds[1] >= y_cut - 1e-12)
    assert removed * 1e4 == pytest.approx(20.0 * 1.0)  # L=20 cm, offset 1 cm


def test_trim_beats_p2p_on_domed_scenes():
    config = fast_config(QUIET)
    for seed in (100, 104, 105):
        scene, truth = generate_scene(random_meat_spec(seed))
        trim, p2p = compare_fat_removal(scene, truth, config, seed=seed)
        assert trim.meat_removed_g < p2p.meat_removed_g


def test_proctor_markers_outside_meat():
    from shapely.geometry import Point

    _, truth = generate_scene(random_meat_spec(7))
    a, b = proctor_markers(truth.interface)
    assert not truth.meat_polygon.contains(Point(a))
    assert not truth.meat_polygon.contains(Point(b))


def test_runlog_persistence_roundtrip(tmp_path, loin_run):
    log, _, _ = loin_run
    run_dir = save_runlog(log, tmp_path)
    text = load_runlog_text(tmp_path, log.run_id)
    assert f"run_id={log.run_id}" in text
    assert text == runlog_to_text(log)
    assert (tmp_path / log.run_id / "config.ini").exists()
    assert (tmp_path / log.run_id / "scene.ppm").exists()
    with pytest.raises(FileNotFoundError):
        load_runlog_text(tmp_path, "doesnotexist")


def test_pipeline_replay_deterministic():
    spec = random_meat_spec(9)
    config = fast_config(QUIET)
    scene1, truth1 = generate_scene(spec)
    log1 = run_pipeline(scene1, truth1, config, run_id="replay")
    scene2, truth2 = generate_scene(spec)
    log2 = run_pipeline(scene2, truth2, RunConfig.from_ini(log1.config_text), run_id="replay")
    pieces1 = [(p.stage, p.kind, round(p.area_cm2, 12)) for p in log1.pieces]
    pieces2 = [(p.stage, p.kind, round(p.area_cm2, 12)) for p in log2.pieces]
    assert pieces1 == pieces2


def test_stage_errors_carry_stage_tag():
    from cutsim.harness import PipelineStageError
    from cutsim.planner import InfeasiblePlanError

    config = fast_config("[harness]\nfat_removal = none\n" + QUIET)
    config.parser["planner"]["n_slices"] = "30"  # 24 cm meat cannot yield 30 slices
    spec = MeatSpec(shape="rect", fat_base_cm=0.0)
    scene, truth = generate_scene(spec)
    with pytest.raises(PipelineStageError) as exc:
        run_pipeline(scene, truth, config)
    assert exc.value.stage == "slice"
    assert isinstance(exc.value.cause, InfeasiblePlanError)


def test_auto_slice_count_for_loin_lengths():
    # ~3 cm chops: a 24-32 cm loin yields 8 to 10 slices depending on length
    config = fast_config("[harness]\nfat_removal = none\n" + QUIET)
    for rx, expected in ((12.0, 8), (13.5, 9), (15.0, 10)):
        spec = MeatSpec(center_cm=(20.0, 13.0), radius_x_cm=rx, radius_y_cm=6.0,
                        shape="rect", fat_base_cm=0.0)
        scene, truth = generate_scene(spec)
        log = run_pipeline(scene, truth, config)
        assert log.n_slices == expected


def test_trim_accuracy_report(loin_run):
    log, _, _ = loin_run
    ta = trim_accuracy(log)
    assert ta.mode == "trim"
    assert ta.meat_removed_g.n == len(log.trim_stats)
    assert all(c.fat_removed_cm2 >= 0 for c in ta.cuts)
