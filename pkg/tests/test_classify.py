import numpy as np
import pytest

from oracles import knn_oracle
from lwsense.classify import KnnModel, load_model, predict, predict_many, save_model, train_knn
from lwsense.errors import DatasetError, KTooLarge, ShapeMismatch, TooFewSamples
from lwsense.types import LABELS, GestureLabel


def test_train_examples():
    m = train_knn([[1.0, 2.0]], ["a"], 1)
    assert len(m) == 1 and m.length == 2
    with pytest.raises(ShapeMismatch):
        train_knn([[1.0], [1.0, 2.0]], ["a", "b"], 1)
    with pytest.raises(KTooLarge):
        train_knn([[1.0]], ["a"], 2)
    with pytest.raises(TooFewSamples):
        train_knn([], [], 1)
    X = np.random.default_rng(0).standard_normal((960, 12))
    assert len(train_knn(X, [LABELS[i % 8] for i in range(960)], 5)) == 960


def test_predict_examples():
    m = train_knn([[0.0, 0.0], [5.0, 0.0]], ["a", "b"], 1)
    assert predict(m, [0.1, 0.0])[0] is GestureLabel.A
    label, votes = predict(m, [5.0, 0.0])
    assert label is GestureLabel.B and votes == {GestureLabel.B: 1}
    with pytest.raises(ShapeMismatch):
        predict(m, [1.0])


def random_instance(rng, integer):
    n = int(rng.integers(1, 41))
    dim = int(rng.integers(1, 6))
    k = int(rng.integers(1, min(n, 9) + 1))
    if integer:
        X = rng.integers(0, 3, (n, dim)).astype(float)
        q = rng.integers(0, 3, dim).astype(float)
    else:
        X = rng.standard_normal((n, dim))
        q = rng.standard_normal(dim)
    labels = [LABELS[i] for i in rng.integers(0, 8, n)]
    return X, labels, q, k


def test_oracle_random_models():
    rng = np.random.default_rng(7)
    for trial in range(150):
        X, labels, q, k = random_instance(rng, integer=trial % 2 == 0)
        want, want_votes = knn_oracle(X.tolist(), [l.value for l in labels], q.tolist(), k)
        got, got_votes = predict(train_knn(X, labels, k), q)
        assert got.value == want
        assert {lab.value: c for lab, c in got_votes.items()} == want_votes


def test_resubstitution_k1():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((40, 6))
    labels = [LABELS[i % 8] for i in range(40)]
    m = train_knn(X, labels, 1)
    assert predict_many(m, X) == labels


def test_permutation_and_scale_invariance():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((40, 5))
    labels = [LABELS[i] for i in rng.integers(0, 8, 40)]
    queries = rng.standard_normal((20, 5))
    base = predict_many(train_knn(X, labels, 5), queries)
    perm = rng.permutation(40)
    assert predict_many(train_knn(X[perm], [labels[i] for i in perm], 5), queries) == base
    assert predict_many(train_knn(3.5 * X, labels, 5), 3.5 * queries) == base


def test_vote_tie_goes_to_closer_then_earlier_label():
    # one neighbour each; distances 1 and 2 -> closer label wins
    m = train_knn([[2.0], [-1.0]], ["a", "b"], 2)
    assert predict(m, [0.0])[0] is GestureLabel.B
    # equal counts and equal summed distance -> earlier label
    m = train_knn([[1.0], [-1.0]], ["c", "b"], 2)
    assert predict(m, [0.0])[0] is GestureLabel.B


def test_model_roundtrip(tmp_path):
    X = np.random.default_rng(4).standard_normal((10, 3))
    m = train_knn(X, [LABELS[i % 8] for i in range(10)], 3)
    save_model(m, tmp_path / "m.json", pipeline={"k": 3})
    back = load_model(tmp_path / "m.json")
    assert isinstance(back, KnnModel)
    assert np.array_equal(back.features, m.features) and back.labels == m.labels and back.k == 3
    (tmp_path / "bad.json").write_text('{"version": 99}')
    with pytest.raises(DatasetError):
        load_model(tmp_path / "bad.json")
