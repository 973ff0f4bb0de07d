"""Feature maps and the kernels they induce."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted


def _as_vector(x, name="x"):
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} has non-finite entries")
    return x


def _check_pair(x, z):
    x, z = _as_vector(x, "x"), _as_vector(z, "z")
    if x.shape != z.shape:
        raise ValueError(f"dimension mismatch: {x.size} vs {z.size}")
    return x, z


def n_amplitude_qubits(n_features):
    """Qubits needed to amplitude-encode ``n_features`` values."""
    return int(n_features - 1).bit_length()


def amplitude_encode(x):
    """Normalise ``x`` and zero-pad it to the next power of two.

    >>> amplitude_encode([3, 4])
    array([0.6, 0.8])
    """
    x = _as_vector(x)
    norm = np.linalg.norm(x)
    if norm == 0:
        raise ValueError("cannot amplitude-encode the zero vector")
    out = np.zeros(2 ** n_amplitude_qubits(x.size))
    out[: x.size] = x / norm
    return out


def linear_kernel(x, z):
    """Squared overlap ``|<x|z>|^2`` of the normalised inputs."""
    x, z = _check_pair(x, z)
    nx, nz = np.linalg.norm(x), np.linalg.norm(z)
    if nx == 0 or nz == 0:
        raise ValueError("linear kernel is undefined for a zero vector")
    return float(min((x @ z / (nx * nz)) ** 2, 1.0))


def angle_kernel(x, z):
    """Product over features of ``cos^2(x_k - z_k)``."""
    x, z = _check_pair(x, z)
    return float(np.prod(np.cos(x - z) ** 2))


def linear_kernel_matrix(X, Z):
    """Kernel matrix of :func:`linear_kernel` between rows of ``X`` and ``Z``."""
    X = check_array(X, dtype=float)
    Z = check_array(Z, dtype=float)
    if X.shape[1] != Z.shape[1]:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Z.shape[1]}")
    nx = np.linalg.norm(X, axis=1)
    nz = np.linalg.norm(Z, axis=1)
    if np.any(nx == 0) or np.any(nz == 0):
        raise ValueError("linear kernel is undefined for a zero vector")
    G = (X / nx[:, None]) @ (Z / nz[:, None]).T
    return np.minimum(G**2, 1.0)


def angle_kernel_matrix(X, Z):
    """Kernel matrix of :func:`angle_kernel` between rows of ``X`` and ``Z``."""
    X = check_array(X, dtype=float)
    Z = check_array(Z, dtype=float)
    if X.shape[1] != Z.shape[1]:
        raise ValueError(f"dimension mismatch: {X.shape[1]} vs {Z.shape[1]}")
    K = np.ones((X.shape[0], Z.shape[0]))
    # Feature-by-feature keeps memory at O(n_x * n_z).
    for k in range(X.shape[1]):
        K *= np.cos(X[:, k, None] - Z[None, :, k]) ** 2
    return K


KERNELS = {"amplitude": linear_kernel, "angle": angle_kernel}
KERNEL_MATRICES = {"amplitude": linear_kernel_matrix, "angle": angle_kernel_matrix}


class MinMaxAngleScaler(TransformerMixin, BaseEstimator):
    """Per-feature affine map of the fitted range onto ``feature_range``.

    Unlike :class:`sklearn.preprocessing.MinMaxScaler`, a constant feature is
    sent to the midpoint of the target range. Values outside the fitted range
    are extrapolated, not clipped.

    Parameters
    ----------
    feature_range : tuple of float, default=(0, pi/2)
    """

    def __init__(self, feature_range=(0.0, np.pi / 2)):
        self.feature_range = feature_range

    def fit(self, X, y=None):
        lo, hi = self.feature_range
        if not hi > lo:
            raise ValueError(f"feature_range must satisfy hi > lo, got {self.feature_range}")
        X = check_array(X, dtype=float)
        self.data_min_ = X.min(axis=0)
        self.data_max_ = X.max(axis=0)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "data_min_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        lo, hi = self.feature_range
        span = self.data_max_ - self.data_min_
        constant = span == 0
        safe = np.where(constant, 1.0, span)
        out = lo + (X - self.data_min_) / safe * (hi - lo)
        out[:, constant] = (lo + hi) / 2
        return out


def scale_features(X_train, target_range=(0.0, np.pi / 2), X_test=None):
    """Min-max scale ``X_train`` onto ``target_range``.

    Parameters are fitted on ``X_train`` only. When ``X_test`` is given, the
    same map is applied to it and both arrays are returned.
    """
    X_train = np.asarray(X_train, dtype=float)
    if X_train.size == 0:
        raise ValueError("cannot scale an empty dataset")
    scaler = MinMaxAngleScaler(tuple(target_range)).fit(X_train)
    if X_test is None:
        return scaler.transform(X_train)
    return scaler.transform(X_train), scaler.transform(X_test)
