import math

import numpy as np
import pytest

import stereo_foremost as sf


def test_elas_on_two_plane_scene():
    frame = sf.render(sf.two_plane_scene(3))
    d = sf.compute_elas(frame["left"], frame["right"], sf.ElasParams.for_resolution(320, 240))
    assert d.shape == (240, 320) and d.dtype == np.float32
    bad, density = sf.bad_pixel_rate(d, frame["gt_disparity"], 1.0, 95)
    assert density > 80.0
    assert bad < 10.0


def test_sgbm_runs_and_respects_range():
    frame = sf.render(sf.two_plane_scene(4))
    params = sf.SgbmParams.for_resolution(320, 240)
    d = sf.block_match(frame["left"], frame["right"], params)
    valid = d[~np.isnan(d)]
    assert valid.size > 0.5 * d.size
    assert valid.min() >= params.d_min and valid.max() <= params.d_max


def test_segmentation_finds_square():
    d8 = np.zeros((120, 160), np.uint8)
    d8[40:80, 60:100] = 200
    params = sf.SegParams()
    blob = sf.select_foremost_blob(sf.preprocess(d8, params), params)
    assert blob is not None
    cu, cv = blob["centroid"]
    assert abs(cu - 79.5) < 1.0 and abs(cv - 59.5) < 1.0


def test_triangulate_inverts_disparity():
    cam = sf.RectifiedCamera()
    cam.focal, cam.baseline, cam.cx, cam.cy = 260.0, 0.068, 159.5, 119.5
    p = sf.triangulate(200.0, 100.0, 20.0, cam)
    assert math.isclose(p[2], 260.0 * 0.068 / 20.0, rel_tol=1e-12)


def test_tracker_step_and_io_round_trip(tmp_path):
    spec = sf.two_plane_scene(5)
    frame = sf.render(spec)
    tracker = sf.AttentionTracker(spec.rig(), sf.TrackerParams.for_resolution("elas", 320, 240))
    rec = tracker.step(frame["left"], frame["right"])
    assert rec["frame"] == 0 and rec["hit"]
    path = str(tmp_path / "l.pgm")
    sf.save_pgm(frame["left"], path)
    assert np.array_equal(sf.load_pgm(path), frame["left"])


def test_errors_are_translated():
    with pytest.raises(sf.Error):
        sf.compute_elas(np.zeros((3, 3), np.uint8), np.zeros((3, 3), np.uint8))
