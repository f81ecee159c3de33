"""Smoke tests for the python bindings."""

import numpy as np
import pytest

import sompca


@pytest.fixture(scope="module")
def dataset():
    samples, labels = sompca.synth(
        classes=3, per_class=10, shape=[6, 5, 4], separation=4.0, noise=1.0, seed=7
    )
    return samples, labels


def test_synth_shapes(dataset):
    samples, labels = dataset
    assert samples.shape == (30, 6, 5, 4)
    assert labels.shape == (30,)
    assert sorted(set(labels.tolist())) == [0, 1, 2]


def test_bounds_and_nu():
    assert sompca.select_nu([300, 200, 3]) == 1
    assert sompca.max_features([300, 200, 3], "so-mpca") == 300
    assert sompca.max_features([300, 200, 3], "fo-mpca") == 3
    assert sompca.max_features([80, 60], "pca", sample_count=70) == 69


def test_train_semi_orthogonality(dataset):
    samples, _ = dataset
    model, trace = sompca.train(samples, algo="so-mpca-rs", features=5)
    assert model.num_features == 5
    assert model.nu == 1
    assert model.variant == "so-mpca-rs"

    # nu-mode vectors are orthonormal
    vectors = np.stack([model.mode_vectors(p)[0] for p in range(5)])
    gram = vectors @ vectors.T
    assert np.abs(gram - np.eye(5)).max() < 1e-8

    # the first EMP is the normalized uniform vector in every mode
    for n, dim in enumerate([6, 5, 4]):
        np.testing.assert_array_equal(
            model.mode_vectors(0)[n], np.full(dim, 1.0 / np.sqrt(dim))
        )

    assert trace[0][:2] == (1, 0)
    sweeps = [t for t in trace if t[0] == 2]
    assert len(sweeps) == 20


def test_projection_and_roundtrip(dataset, tmp_path):
    samples, _ = dataset
    model, _ = sompca.train(samples, algo="so-mpca", features=4)
    feats = model.project(samples)
    assert feats.shape == (30, 4)

    path = str(tmp_path / "model.json")
    model.save(path)
    reloaded = sompca.Model.load(path)
    np.testing.assert_array_equal(reloaded.project(samples), feats)


def test_training_is_deterministic(dataset):
    samples, _ = dataset
    a, _ = sompca.train(samples, algo="so-mpca-rs", features=3)
    b, _ = sompca.train(samples, algo="so-mpca-rs", features=3)
    np.testing.assert_array_equal(np.asarray(a.scatters()), np.asarray(b.scatters()))
    for p in range(3):
        for va, vb in zip(a.mode_vectors(p), b.mode_vectors(p)):
            np.testing.assert_array_equal(va, vb)


def test_feature_bound_error(dataset):
    samples, _ = dataset
    with pytest.raises(ValueError, match="at most 4"):
        sompca.train(samples, algo="fo-mpca", features=5)


def test_split_protocol(dataset):
    samples, labels = dataset
    report = sompca.split_protocol(
        samples,
        labels.tolist(),
        algo="so-mpca-rs",
        per_class_train=4,
        repetitions=3,
        feature_counts=[3, 99],
        ranks=[1],
        seed=5,
    )
    good = report[(3, 1)]
    assert good["available"]
    assert len(good["per_rep"]) == 3
    assert 0.0 <= good["mean"] <= 1.0
    assert not report[(99, 1)]["available"]


def test_dataset_io(dataset, tmp_path):
    samples, labels = dataset
    path = str(tmp_path / "data.ten")
    sompca.save_dataset(path, samples, labels.tolist())
    loaded_samples, loaded_labels = sompca.load_dataset(path)
    np.testing.assert_array_equal(loaded_samples, samples)
    np.testing.assert_array_equal(loaded_labels, labels)
