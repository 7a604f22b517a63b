import math

import numpy as np
import pytest

from gesturebot import eigengesture as eg
from gesturebot.errors import EmptyTemplateSet, GeometryMismatch
from gesturebot.raster import BinFrame
from gesturebot.synth import SyntheticSpec, make_templates
from oracles import centered_1nn_oracle, power_iteration_oracle

GEOM = (60, 80)


def random_template(rng, label, p=0.5):
    bits = (rng.random((GEOM[1], GEOM[0])) < p).astype(np.uint8)
    return eg.GestureTemplate(label, BinFrame(bits))


def test_train_empty_raises():
    with pytest.raises(EmptyTemplateSet):
        eg.train([])


def test_train_single_template(rng):
    t = random_template(rng, 0)
    model = eg.train([t])
    assert model.k == 0
    assert np.array_equal(model.mean, t.image.bits.reshape(-1).astype(float))
    assert model.coords.shape == (1, 0)
    assert model.tau == math.inf


def test_train_two_templates_component_is_difference(rng):
    t0 = random_template(rng, 0)
    t1 = random_template(rng, 1)
    model = eg.train([t0, t1])
    assert model.k == 1
    diff = (t0.image.bits.astype(float) - t1.image.bits.astype(float)).reshape(-1)
    diff /= np.linalg.norm(diff)
    cosine = abs(float(model.components[0] @ diff))
    assert cosine >= 1 - 1e-8
    # cross-check against power iteration on the explicit covariance
    x = np.stack([t.image.bits.reshape(-1).astype(float) for t in (t0, t1)])
    c = x - x.mean(axis=0)
    cov = c.T @ c
    v = power_iteration_oracle(cov)
    assert abs(float(model.components[0] @ v)) >= 1 - 1e-6


def test_rank_cap(rng):
    templates = [random_template(rng, i) for i in range(10)]
    model = eg.train(templates, k_max=50)
    assert model.k <= 9


def test_orthonormality(rng):
    templates = [random_template(rng, i) for i in range(10)]
    model = eg.train(templates, k_max=20)
    gram = model.components @ model.components.T
    assert np.max(np.abs(gram - np.eye(model.k))) <= 1e-8


def test_eigenvalues_sorted_nonnegative(rng):
    model = eg.train([random_template(rng, i) for i in range(8)])
    w = model.eigenvalues
    assert np.all(w >= 0)
    assert np.all(np.diff(w) <= 0)


def test_project_training_template_matches_coords(rng):
    templates = [random_template(rng, i) for i in range(6)]
    model = eg.train(templates)
    for i, t in enumerate(templates):
        assert np.max(np.abs(eg.project(model, t.image) - model.coords[i])) <= 1e-8


def test_geometry_mismatch(rng):
    model = eg.train([random_template(rng, 0)])
    with pytest.raises(GeometryMismatch):
        eg.project(model, BinFrame(np.zeros((10, 10), dtype=np.uint8)))


def test_parseval_full_rank(rng):
    templates = [random_template(rng, i) for i in range(10)]
    model = eg.train(templates, k_max=9)
    x = np.stack([t.image.bits.reshape(-1).astype(float) for t in templates])
    c = x - x.mean(axis=0)
    for i in range(10):
        for j in range(i + 1, 10):
            pix = np.linalg.norm(c[i] - c[j])
            eig = np.linalg.norm(model.coords[i] - model.coords[j])
            assert abs(pix - eig) <= 1e-6


def test_classify_training_template_self(rng):
    templates = [random_template(rng, i) for i in range(5)]
    model = eg.train(templates)
    for t in templates:
        c = eg.classify(model, t.image)
        assert c.label == t.label
        assert c.distance <= 1e-6


def test_classify_rejects_far_probe():
    templates = make_templates(SyntheticSpec(n_labels=4))
    model = eg.train(templates, tau_override=1.0)
    assert model.tau == 1.0
    blank = BinFrame(np.zeros((80, 60), dtype=np.uint8))
    c = eg.classify(model, blank)
    assert c.label is None
    assert c.distance > model.tau
    # templates themselves still land inside any positive margin
    assert eg.classify(model, templates[0].image).label == templates[0].label


def test_classify_agrees_with_pixel_space_1nn(rng):
    templates = [random_template(rng, i) for i in range(10)]
    model = eg.train(templates, k_max=9, tau_override=math.inf)
    images = [t.image.bits for t in templates]
    mean = np.stack([im.reshape(-1).astype(float) for im in images]).mean(axis=0)
    for _ in range(100):
        src = int(rng.integers(0, 10))
        bits = images[src].copy()
        flips = rng.choice(bits.size, size=96, replace=False)  # 2% of 4800
        flat = bits.reshape(-1).copy()
        flat[flips] ^= 1
        probe = flat.reshape(bits.shape)
        idx, dist = centered_1nn_oracle(images, mean, probe)
        c = eg.classify(model, BinFrame(probe))
        assert c.label == templates[idx].label
        # eigen distance drops the probe's residual outside the template
        # span; pixel distance is recovered exactly by Pythagoras
        y = eg.project(model, BinFrame(probe))
        recon = model.mean + y @ model.components
        residual = np.linalg.norm(probe.reshape(-1).astype(float) - recon)
        assert abs(math.hypot(c.distance, residual) - dist) <= 1e-6


def test_classify_deterministic(rng):
    templates = [random_template(rng, i) for i in range(6)]
    probe = random_template(rng, 0).image
    m1 = eg.train(templates)
    m2 = eg.train(templates)
    c1 = eg.classify(m1, probe)
    c2 = eg.classify(m2, probe)
    assert c1.label == c2.label
    assert abs(c1.distance - c2.distance) <= 1e-9


def test_tau_scaling_never_creates_unknown(rng):
    templates = [random_template(rng, i) for i in range(5)]
    model = eg.train(templates)
    probe = random_template(rng, 0).image
    base = eg.classify(model, probe)
    import dataclasses
    wider = dataclasses.replace(model, tau=model.tau * 3 if math.isfinite(model.tau) else model.tau)
    again = eg.classify(wider, probe)
    if base.label is not None:
        assert again.label is not None


def test_reconstruction_error_non_increasing_in_k(rng):
    templates = [random_template(rng, i) for i in range(8)]
    x0 = templates[0].image.bits.reshape(-1).astype(float)
    prev = math.inf
    for k in range(1, 8):
        model = eg.train(templates, k_max=k)
        centered = x0 - model.mean
        coords = model.components @ centered
        recon = model.components.T @ coords
        err = float(np.linalg.norm(centered - recon))
        assert err <= prev + 1e-9
        prev = err


def test_sign_convention_stable(rng):
    templates = [random_template(rng, i) for i in range(6)]
    m1 = eg.train(templates)
    m2 = eg.train(list(templates))
    assert np.array_equal(m1.components, m2.components)
    for row in m1.components:
        assert row[int(np.argmax(np.abs(row)))] > 0


def test_model_persistence_round_trip(tmp_path, rng):
    templates = [random_template(rng, i % 3) for i in range(6)]
    model = eg.train(templates, k_max=5)
    eg.save_model(tmp_path / "m", templates, model)
    loaded_templates, loaded = eg.load_model(tmp_path / "m")
    assert len(loaded_templates) == 6
    assert loaded.k == model.k
    assert loaded.tau == pytest.approx(model.tau)
    probe = random_template(rng, 0).image
    a = eg.classify(model, probe)
    b = eg.classify(loaded, probe)
    assert a.label == b.label
    assert a.distance == pytest.approx(b.distance, abs=1e-9)
