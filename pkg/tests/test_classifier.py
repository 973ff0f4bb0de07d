import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.model_selection import cross_val_score

from mcswap.classifier import (
    ClassifierConfig,
    PredictedVector,
    SwapTestClassifier,
    TrainingSet,
    classify,
    predicted_classical,
    prepare_initial_state,
    run_tomography,
)
from mcswap.data import generate_xor
from mcswap.encoding import amplitude_encode, linear_kernel
from mcswap.labels import tammes_placement

EXACT = ClassifierConfig(execution="exact")


def random_problem(rng, n_features, n_train, n_labels):
    labels = tammes_placement(n_labels)
    train = TrainingSet(
        rng.standard_normal((n_train, n_features)), rng.integers(0, n_labels, n_train)
    )
    return rng.standard_normal(n_features), train, labels


def test_training_set_weights():
    t = TrainingSet(np.ones((4, 2)), [0, 1, 0, 1])
    np.testing.assert_allclose(t.weights, 0.25)
    with pytest.raises(ValueError):
        TrainingSet(np.ones((2, 2)), [0, 1], weights=[0.7, 0.7])
    with pytest.raises(ValueError):
        TrainingSet(np.empty((0, 2)), [])


def test_initial_state_single_point_is_product():
    x = np.array([0.3, -1.2, 0.5])
    labels = tammes_placement(2)
    s = prepare_initial_state(x, TrainingSet([x], [0]), labels)
    xh = amplitude_encode(x)
    # bit order, most significant first: label, train, test, ancilla
    expected = np.kron(np.kron(np.kron([1, 0], xh), xh), [1, 0])
    np.testing.assert_allclose(s.amplitudes, expected, atol=1e-15)


def test_initial_state_two_branches():
    x = np.array([1.0, 0.0])
    labels = tammes_placement(3)
    train = TrainingSet([[1.0, 0.0], [0.0, 1.0]], [1, 2])
    s = prepare_initial_state(x, train, labels)
    psi = labels.states()
    expected = sum(
        np.sqrt(0.5)
        * np.kron(np.kron(np.kron(np.kron(np.eye(2)[m], psi[c]), amplitude_encode(p)), [1, 0]), [1, 0])
        for m, (p, c) in enumerate(zip(train.points, train.labels))
    )
    np.testing.assert_allclose(s.amplitudes, expected, atol=1e-15)
    assert s.norm() == pytest.approx(1.0, abs=1e-12)


def test_initial_state_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        prepare_initial_state([1.0, 2.0], TrainingSet([[1.0, 2.0, 3.0]], [0]), tammes_placement(2))


def test_initial_state_reduced_data_block_matches_kron(rng):
    """Reduced density of (test, train) registers against an explicit sum."""
    ds = generate_xor(4, 3, 16, seed=0)
    test, train_X, train_y = ds.features[0], ds.features[1:], ds.labels[1:]
    s = prepare_initial_state(test, TrainingSet(train_X, train_y), tammes_placement(4))
    lay = s.layout
    dim = 2**lay.n_data_qubits
    T = s.amplitudes.reshape(2**lay.n_index_qubits, 2, dim * dim, 2)[..., 0]
    rho = np.einsum("mla,mlb->ab", T, T.conj())
    t = amplitude_encode(test)
    oracle = sum(np.outer(np.kron(amplitude_encode(x), t), np.kron(amplitude_encode(x), t)) for x in train_X)
    np.testing.assert_allclose(rho, oracle / len(train_X), atol=1e-12)


@pytest.mark.parametrize("L", [2, 3, 4])
def test_single_training_point_recovers_label(L):
    labels = tammes_placement(L)
    x = np.array([0.2, 0.9, -0.4])
    for c in range(L):
        pv = run_tomography(x, TrainingSet([x], [c]), labels, EXACT)
        np.testing.assert_allclose(pv.xyz, labels.vectors[c], atol=1e-12)


def test_orthogonal_training_point_gives_zero_vector():
    pv = run_tomography([1.0, 0.0], TrainingSet([[0.0, 1.0]], [0]), tammes_placement(3), EXACT)
    np.testing.assert_allclose(pv.xyz, 0.0, atol=1e-15)
    assert pv.degenerate


def test_classical_examples():
    labels = tammes_placement(3)
    same = TrainingSet([[1.0, 2.0], [2.0, 4.0]], [0, 0])
    pv = predicted_classical([1.0, 2.0], same, labels)
    np.testing.assert_allclose(pv.xyz, labels.vectors[0], atol=1e-12)

    ortho = TrainingSet([[0.0, 1.0], [0.0, -3.0]], [0, 1])
    assert predicted_classical([1.0, 0.0], ortho, labels).degenerate

    # kernels 1 and |<(1,0),(1,1)/sqrt2>|^2 = 0.5 with weights 1/2
    two = TrainingSet([[1.0, 0.0], [1.0, 1.0]], [0, 1])
    pv = predicted_classical([1.0, 0.0], two, tammes_placement(2))
    np.testing.assert_allclose(pv.alphas, [0.5, 0.25], atol=1e-15)
    np.testing.assert_allclose(pv.xyz, 0.5 * np.array([0, 0, 1]) + 0.25 * np.array([0, 0, -1]))


def test_custom_kernel_callable():
    labels = tammes_placement(2)
    train = TrainingSet([[1.0, 0.0], [0.0, 1.0]], [0, 1])
    pv = predicted_classical([1.0, 0.0], train, labels, kernel=lambda a, b: 1.0)
    np.testing.assert_allclose(pv.alphas, [0.5, 0.5])


@settings(max_examples=60, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(1, 4),
    m=st.integers(1, 8),
    L=st.sampled_from([2, 3, 4]),
)
def test_circuit_matches_kernel_sum(seed, n, m, L):
    rng = np.random.default_rng(seed)
    x, train, labels = random_problem(rng, n, m, L)
    circ = run_tomography(x, train, labels, EXACT)
    classical = predicted_classical(x, train, labels, linear_kernel)
    np.testing.assert_allclose(circ.xyz, classical.xyz, atol=1e-10)
    np.testing.assert_allclose(classical.alphas @ labels.vectors, classical.xyz, atol=1e-12)
    assert classical.norm <= classical.alphas.sum() + 1e-12 <= 1 + 1e-9


def test_row_permutation_invariance(rng):
    x, train, labels = random_problem(rng, 3, 7, 4)
    perm = rng.permutation(7)
    shuffled = TrainingSet(train.points[perm], train.labels[perm])
    a = run_tomography(x, train, labels, EXACT).xyz
    b = run_tomography(x, shuffled, labels, EXACT).xyz
    np.testing.assert_allclose(a, b, atol=1e-12)


@pytest.mark.parametrize("p", [0.0, 0.05, 0.3, 1.0])
def test_exact_noise_scales_prediction(rng, p):
    x, train, labels = random_problem(rng, 4, 6, 3)
    clean = run_tomography(x, train, labels, EXACT).xyz
    noisy = run_tomography(x, train, labels, ClassifierConfig(execution="exact", noise=p)).xyz
    np.testing.assert_allclose(noisy, (1 - p) * clean, atol=1e-10)


def test_sampled_mode_is_reproducible_and_keyed(rng):
    x, train, labels = random_problem(rng, 2, 3, 2)
    cfg = ClassifierConfig(execution="sampled", shots=256, seed=7)
    a = run_tomography(x, train, labels, cfg, key=(3,)).xyz
    b = run_tomography(x, train, labels, cfg, key=(3,)).xyz
    c = run_tomography(x, train, labels, cfg, key=(4,)).xyz
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_config_validation():
    with pytest.raises(ValueError):
        ClassifierConfig(encoding="angle", execution="exact")
    with pytest.raises(ValueError):
        ClassifierConfig(execution="sampled", shots=0)
    with pytest.raises(ValueError):
        ClassifierConfig(noise=1.5)
    with pytest.raises(ValueError):
        run_tomography([1.0], TrainingSet([[1.0]], [0]), tammes_placement(2), ClassifierConfig(execution="classical"))


def test_classify_examples():
    labels = tammes_placement(3)
    x = np.array([0.4, 0.1])
    assert classify(x, TrainingSet([x], [2]), labels, EXACT) == 2
    assert classify(x, TrainingSet([x], [1]), labels, ClassifierConfig(execution="classical")) == 1


def test_predicted_vector_to_dict():
    d = PredictedVector(np.array([0.0, 3.0, 4.0]), np.array([0.5, 0.5])).to_dict()
    assert d == {"xyz": [0.0, 3.0, 4.0], "alphas": [0.5, 0.5], "norm": 5.0}


class TestEstimator:
    def test_get_params_and_clone(self):
        clf = SwapTestClassifier(encoding="angle", noise=0.1)
        params = clf.get_params()
        assert params["encoding"] == "angle" and params["noise"] == 0.1
        assert clone(clf).get_params() == params

    def test_fit_predict_string_labels(self):
        X = np.array([[1.0, 0.0], [0.9, 0.1], [0.0, 1.0], [0.1, 0.9]])
        y = np.array(["a", "a", "b", "b"])
        clf = SwapTestClassifier().fit(X, y)
        np.testing.assert_array_equal(clf.predict(X), y)
        assert clf.decision_function(X).shape == (4, 2)

    def test_circuit_and_classical_estimators_agree(self):
        ds = generate_xor(3, 3, 6, seed=1)
        a = SwapTestClassifier(execution="classical").fit(ds.features, ds.labels)
        b = SwapTestClassifier(execution="exact").fit(ds.features, ds.labels)
        np.testing.assert_allclose(a.predict_vector(ds.features), b.predict_vector(ds.features), atol=1e-10)

    def test_cross_val_score_on_xor(self):
        ds = generate_xor(4, 3, 20, seed=0)
        scores = cross_val_score(SwapTestClassifier(), ds.features, ds.labels, cv=5)
        assert scores.mean() == 1.0

    def test_angle_encoding_scaler_fitted(self):
        X = np.array([[0.0, 5.0], [10.0, 5.0], [2.0, 5.0]])
        clf = SwapTestClassifier(encoding="angle").fit(X, [0, 1, 0])
        np.testing.assert_allclose(clf.scaler_.transform(X)[:, 0], [0, np.pi / 2, np.pi / 10])

    def test_noise_scales_classical_vectors(self):
        ds = generate_xor(2, 2, 5, seed=0)
        a = SwapTestClassifier().fit(ds.features, ds.labels).predict_vector(ds.features)
        b = SwapTestClassifier(noise=0.2).fit(ds.features, ds.labels).predict_vector(ds.features)
        np.testing.assert_allclose(b, 0.8 * a, atol=1e-12)

    def test_pinned_classes(self):
        X = np.array([[1.0, 0.0], [0.0, 1.0]])
        clf = SwapTestClassifier(classes=[0, 1, 2]).fit(X, [0, 1])
        assert clf.label_set_.n_labels == 3
        with pytest.raises(ValueError):
            SwapTestClassifier(classes=[0, 1]).fit(X, [0, 5])

    def test_errors(self):
        with pytest.raises(ValueError):
            SwapTestClassifier().fit([[1.0], [2.0]], [0, 0])
        clf = SwapTestClassifier().fit([[1.0, 0.0], [0.0, 1.0]], [0, 1])
        with pytest.raises(ValueError):
            clf.predict([[1.0, 2.0, 3.0]])
