"""Depth-based foremost-object attention: stereo matching, segmentation, tracking."""

from ._core import (
    AttentionTracker,
    ElasParams,
    RectifiedCamera,
    Error,
    SceneSpec,
    SegParams,
    SgbmParams,
    StereoRig,
    TrackerParams,
    bad_pixel_rate,
    block_match,
    colorblob_detect,
    compute_elas,
    compute_rectification,
    load_pfm,
    load_pgm,
    preprocess,
    render,
    save_pfm,
    save_pgm,
    select_foremost_blob,
    set_thread_cap,
    thread_count,
    to_8bit,
    triangulate,
    two_plane_scene,
)

__all__ = [
    "AttentionTracker",
    "ElasParams",
    "RectifiedCamera",
    "Error",
    "SceneSpec",
    "SegParams",
    "SgbmParams",
    "StereoRig",
    "TrackerParams",
    "bad_pixel_rate",
    "block_match",
    "colorblob_detect",
    "compute_elas",
    "compute_rectification",
    "load_pfm",
    "load_pgm",
    "preprocess",
    "render",
    "save_pfm",
    "save_pgm",
    "select_foremost_blob",
    "set_thread_cap",
    "thread_count",
    "to_8bit",
    "triangulate",
    "two_plane_scene",
]
