import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mcswap.encoding import (
    MinMaxAngleScaler,
    amplitude_encode,
    angle_kernel,
    angle_kernel_matrix,
    linear_kernel,
    linear_kernel_matrix,
    scale_features,
)
from mcswap.qsim import Gate, expectation_z, init_state

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_amplitude_encode_examples():
    np.testing.assert_allclose(amplitude_encode([3, 4]), [0.6, 0.8])
    out = amplitude_encode([1, 1, 1])
    np.testing.assert_allclose(out, [1 / np.sqrt(3)] * 3 + [0])
    assert out.size == 4


def test_amplitude_encode_rejects_zero():
    with pytest.raises(ValueError):
        amplitude_encode([0, 0])


@settings(max_examples=50)
@given(arrays(float, st.integers(1, 9), elements=finite))
def test_amplitude_encode_unit_norm(x):
    if np.linalg.norm(x) < 1e-6:
        return
    enc = amplitude_encode(x)
    assert enc @ enc == pytest.approx(1.0, abs=1e-12)
    assert enc.size & (enc.size - 1) == 0


def test_linear_kernel_examples():
    assert linear_kernel([1, 0, 0], [1, 0, 0]) == 1.0
    assert linear_kernel([1, 0], [0, 1]) == 0.0
    assert linear_kernel([1, 1], [1, 0]) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(ValueError):
        linear_kernel([1, 0], [1, 0, 0])


def test_angle_kernel_examples():
    assert angle_kernel([0.3, 1.1], [0.3, 1.1]) == 1.0
    assert angle_kernel([np.pi / 2, 0.4], [0.0, 2.0]) == pytest.approx(0.0, abs=1e-30)
    assert angle_kernel([np.pi / 4, np.pi / 4], [0, 0]) == pytest.approx(0.25, abs=1e-15)
    with pytest.raises(ValueError):
        angle_kernel([1.0], [1.0, 2.0])


pairs = st.integers(1, 6).flatmap(
    lambda n: st.tuples(arrays(float, n, elements=finite), arrays(float, n, elements=finite))
)


@settings(max_examples=80)
@given(pairs)
def test_kernel_symmetry_and_range(xz):
    x, z = xz
    k = angle_kernel(x, z)
    assert k == angle_kernel(z, x)
    assert 0 <= k <= 1
    assert angle_kernel(x, x) == 1.0
    if np.linalg.norm(x) > 1e-6 and np.linalg.norm(z) > 1e-6:
        k = linear_kernel(x, z)
        assert k == pytest.approx(linear_kernel(z, x), abs=1e-15)
        assert 0 <= k <= 1
        assert linear_kernel(x, x) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8))
def test_swap_test_on_encoded_states_gives_linear_kernel(seed, n):
    rng = np.random.default_rng(seed)
    x, z = rng.standard_normal(n), rng.standard_normal(n)
    a, b = amplitude_encode(x), amplitude_encode(z)
    k = int(np.log2(a.size))
    s = init_state(np.kron(np.kron(b, a), [1, 0]))
    s.apply(Gate.h(0)).apply(Gate.cswap(0, range(1, k + 1), range(k + 1, 2 * k + 1)))
    s.apply(Gate.h(0))
    assert expectation_z(s, 0) == pytest.approx(linear_kernel(x, z), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(2, 8), n=st.integers(1, 6))
def test_gram_matrices_are_psd(seed, m, n):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((m, n))
    for K in (linear_kernel_matrix(X, X), angle_kernel_matrix(X, X)):
        np.testing.assert_allclose(K, K.T, atol=1e-14)
        assert np.linalg.eigvalsh(K).min() >= -1e-9


def test_kernel_matrices_match_pointwise(rng):
    X, Z = rng.standard_normal((5, 3)), rng.standard_normal((4, 3))
    L = linear_kernel_matrix(X, Z)
    A = angle_kernel_matrix(X, Z)
    for i in range(5):
        for j in range(4):
            assert L[i, j] == pytest.approx(linear_kernel(X[i], Z[j]), abs=1e-14)
            assert A[i, j] == pytest.approx(angle_kernel(X[i], Z[j]), abs=1e-14)


def test_scale_features_endpoints_and_constant():
    X = np.array([[0.0, 7.0], [5.0, 7.0], [10.0, 7.0]])
    out = scale_features(X, (1.0, 3.0))
    np.testing.assert_allclose(out[:, 0], [1.0, 2.0, 3.0])
    np.testing.assert_allclose(out[:, 1], [2.0, 2.0, 2.0])


def test_scaling_fitted_on_training_rows_only():
    train = np.array([[0.0], [10.0]])
    test = np.array([[20.0]])
    _, t = scale_features(train, (0.0, 1.0), X_test=test)
    assert t[0, 0] == pytest.approx(2.0)


def test_scale_features_rejects_bad_input():
    with pytest.raises(ValueError):
        scale_features(np.empty((0, 2)))
    with pytest.raises(ValueError):
        MinMaxAngleScaler((1.0, 1.0)).fit([[0.0], [1.0]])
