import json
import math

import numpy as np
import pytest

import seqrecon as sr

CONFIG = json.dumps({"N": 10, "J": 3, "seed": 7, "snr_db": 10, "solver": {"max_iter": 80}})


@pytest.fixture(scope="module")
def frames():
    return sr.simulate(CONFIG)


def test_simulated_frames_have_grid_shape(frames):
    assert len(frames) == 3
    for j, f in enumerate(frames, start=1):
        assert f.index == j
        assert f.grid.side == 21
        assert f.coeffs.shape == (21, 21)
        assert f.available.shape == (21, 21)
        assert f.noise_sigma > 0
    truth = sr.truth(CONFIG)
    assert len(truth) == 3 and truth[0].shape == (21, 21)


def test_simulation_is_deterministic(frames):
    again = sr.simulate(CONFIG)
    for a, b in zip(frames, again):
        assert np.array_equal(a.coeffs, b.coeffs)


def test_weights_and_weighted_solve(frames):
    edges = sr.edge_map(frames[0])
    assert len(edges.per_rotation) == 10
    w = sr.weights(edges)
    assert w.shape == (21, 21)
    # The strongest edge pixel gets weight (1 - 1)/c = 0.
    assert np.all(w >= 0) and np.all(w <= 1) and w.min() == 0.0
    image, report = sr.solve_vbjs(frames[0], w, max_iter=80)
    assert image.shape == (21, 21)
    assert report["iterations"] <= 80
    err = sr.mse_log(sr.truth(CONFIG)[0], image)
    assert math.isfinite(err)


def test_joint_solve_and_change_masks(frames):
    edges = [sr.edge_map(f) for f in frames]
    masks = sr.change_masks(edges)
    assert len(masks) == 2
    ws = [sr.weights(e) for e in edges]
    images, report = sr.solve_joint(frames, ws, masks, beta=0.5, max_iter=60)
    assert len(images) == 3
    assert all(np.isfinite(im).all() for im in images)


def test_diff_measure_is_symmetric():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = (rng.random((9, 9)) < 0.4).astype(np.uint8)
        b = (rng.random((9, 9)) < 0.4).astype(np.uint8)
        assert sr.diff_measure(a, b) == pytest.approx(sr.diff_measure(b, a))
        assert sr.diff_measure(a, a) == 0.0


def test_errors_surface_as_value_error():
    with pytest.raises(ValueError):
        sr.simulate('{"N": -1}')
