"""Joint reconstruction of image sequences from band-limited Fourier data."""

from ._seqrecon import (
    EdgeMap,
    Error,
    FourierFrame,
    GridSpec,
    change_masks,
    concentration_sum_1d,
    config_hash,
    diff_measure,
    edge_map,
    frame_from_image,
    mse_log,
    run_pipeline,
    simulate,
    solve_joint,
    solve_l1,
    solve_vbjs,
    truth,
    weights,
)

__all__ = [
    "EdgeMap",
    "Error",
    "FourierFrame",
    "GridSpec",
    "change_masks",
    "concentration_sum_1d",
    "config_hash",
    "diff_measure",
    "edge_map",
    "frame_from_image",
    "mse_log",
    "run_pipeline",
    "simulate",
    "solve_joint",
    "solve_l1",
    "solve_vbjs",
    "truth",
    "weights",
]
