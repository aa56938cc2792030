import numpy as np
import pytest

import bodyfit

ZERO_SHAPE = [0.0] * bodyfit.SHAPE_GENES
ZERO_POSE = [0.0] * bodyfit.POSE_GENES


@pytest.fixture(scope="module")
def model():
    return bodyfit.build_model(seed=1)


def test_model_shape(model):
    assert model.vertex_count > 0
    assert model.component_count == 20
    ev = model.eigenvalues
    assert np.all(np.diff(ev) <= 0)


def test_synthesize_mean(model):
    mesh = bodyfit.synthesize(model, ZERO_SHAPE, ZERO_POSE)
    assert mesh["vertices"].shape == (model.vertex_count, 3)
    assert mesh["faces"].max() < model.vertex_count


def test_render_and_self_cost(model):
    shape = [0.5] + ZERO_SHAPE[1:]
    pose = [10.0, 5.0, 20.0, 15.0]
    views = bodyfit.render(model, shape, pose)
    front, side = views["front"]["image"], views["side"]["image"]
    assert front.shape == (480, 640) and front.dtype == bool
    assert front.sum() > side.sum() > 0
    assert views["front"]["boundary"].shape[1] == 2
    cost = bodyfit.evaluate(model, shape, pose, front, side)
    assert cost["f"] == pytest.approx(0.0, abs=1e-9)
    other = bodyfit.evaluate(model, ZERO_SHAPE, ZERO_POSE, front, side)
    assert other["f"] > 0.0


def test_fit_short_run(model):
    views = bodyfit.render(model, ZERO_SHAPE, [5.0] * 4, 320, 240)
    r = bodyfit.fit(model, views["front"]["image"], views["side"]["image"], seed=3, iterations=2)
    assert len(r["shape"]) == 20 and len(r["pose"]) == 4
    assert len(r["best_history"]) == 3
    assert all(a >= b for a, b in zip(r["best_history"], r["best_history"][1:]))


def test_measure_normalised(model):
    m = bodyfit.measure(model, ZERO_SHAPE, ZERO_POSE)
    assert len(m) == 16
    assert m["O"] == pytest.approx(1700.0, rel=1e-9)
    posed = bodyfit.measure(model, ZERO_SHAPE, [30.0] * 4)
    assert posed == pytest.approx(m)


def test_io_round_trip(model, tmp_path):
    img = bodyfit.render(model, ZERO_SHAPE, ZERO_POSE, 128, 96)["side"]["image"]
    path = tmp_path / "s.pbm"
    bodyfit.write_pbm(img, path)
    assert np.array_equal(bodyfit.read_silhouette(path), img)
    model.save(tmp_path / "m.bfm")
    again = bodyfit.load_model(tmp_path / "m.bfm")
    assert again.vertex_count == model.vertex_count


def test_errors(model, tmp_path):
    with pytest.raises(bodyfit.InvalidArgument):
        bodyfit.synthesize(model, [0.0] * 3, ZERO_POSE)
    with pytest.raises(bodyfit.EmptySilhouetteError):
        blank = np.zeros((100, 100), dtype=bool)
        bodyfit.evaluate(model, ZERO_SHAPE, ZERO_POSE, blank, blank)
    bad = tmp_path / "bad.bfm"
    bad.write_text("nope")
    with pytest.raises(bodyfit.ModelFormatError):
        bodyfit.load_model(bad)
    assert issubclass(bodyfit.ConfigError, bodyfit.Error)
