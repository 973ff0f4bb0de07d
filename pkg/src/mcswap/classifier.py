"""Multi-class SWAP-test classifier: circuit path, kernel-sum path, estimator."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .encoding import KERNEL_MATRICES, KERNELS, MinMaxAngleScaler, amplitude_encode
from .labels import LabelSet, assign, is_degenerate, tammes_placement
from .noise import (
    depolarize_label_qubit,
    ensemble_expectation_z,
    sample_depolarized_z,
    scale_prediction,
)
from .qsim import Gate, RegisterLayout, Statevector, expectation_z, sample_z

EXECUTION_MODES = ("exact", "sampled", "classical")
BASES = ("x", "y", "z")


@dataclass
class TrainingSet:
    """Training rows, integer class labels and branch weights."""

    points: np.ndarray
    labels: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.labels = np.asarray(self.labels, dtype=int).ravel()
        M = self.points.shape[0]
        if M == 0:
            raise ValueError("training set is empty")
        if self.labels.shape[0] != M:
            raise ValueError(f"{M} points but {self.labels.shape[0]} labels")
        if self.weights is None:
            self.weights = np.full(M, 1.0 / M)
        else:
            self.weights = np.asarray(self.weights, dtype=float).ravel()
            if self.weights.shape[0] != M or np.any(self.weights < 0):
                raise ValueError("need one non-negative weight per training point")
            if abs(self.weights.sum() - 1.0) > 1e-12:
                raise ValueError(f"weights sum to {self.weights.sum()}, not 1")

    def __len__(self):
        return self.points.shape[0]


@dataclass
class PredictedVector:
    """Reconstructed label-qubit Bloch vector.

    ``alphas`` (per-class kernel sums) is only known on the classical path.
    """

    xyz: np.ndarray
    alphas: np.ndarray | None = None

    @property
    def norm(self):
        return float(np.linalg.norm(self.xyz))

    @property
    def degenerate(self):
        return is_degenerate(self.xyz)

    def to_dict(self):
        return {
            "xyz": [float(v) for v in self.xyz],
            "alphas": None if self.alphas is None else [float(a) for a in self.alphas],
            "norm": self.norm,
        }


@dataclass
class ClassifierConfig:
    """Run-level settings for one evaluation.

    ``execution`` is ``"exact"`` (exact circuit expectations), ``"sampled"``
    (``shots`` measurements per basis) or ``"classical"`` (kernel sums).
    """

    encoding: str = "amplitude"
    execution: str = "exact"
    shots: int = 8192
    noise: float = 0.0
    label_set: LabelSet | None = None
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.encoding not in KERNELS:
            raise ValueError(f"unknown encoding {self.encoding!r}")
        if self.execution not in EXECUTION_MODES:
            raise ValueError(f"unknown execution mode {self.execution!r}")
        if self.encoding == "angle" and self.execution != "classical":
            raise ValueError("angle encoding is only evaluated on the classical path")
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError(f"noise must lie in [0, 1], got {self.noise}")
        if self.execution == "sampled" and int(self.shots) < 1:
            raise ValueError("sampled execution needs shots >= 1")


def _check_problem(test, train, labels):
    test = np.asarray(test, dtype=float).ravel()
    if test.shape[0] != train.points.shape[1]:
        raise ValueError(
            f"test point has {test.shape[0]} features, training set {train.points.shape[1]}"
        )
    if train.labels.min() < 0 or train.labels.max() >= labels.n_labels:
        raise ValueError(f"training labels must lie in [0, {labels.n_labels})")
    return test


def prepare_initial_state(test, train, labels):
    """Amplitude-initialised register state for one test point.

    Superposes, over training points ``m`` with amplitude ``sqrt(w_m)``, the
    product of ancilla ``|0>``, the encoded test point, the encoded training
    point, the label state of its class and the index ``|m>``.
    """
    test = _check_problem(test, train, labels)
    M, N = train.points.shape
    layout = RegisterLayout.for_problem(N, M)
    dim = 2**layout.n_data_qubits
    test_amp = amplitude_encode(test)
    states = labels.states()
    # Axis order follows the bit order from most to least significant.
    amps = np.zeros((2**layout.n_index_qubits, 2, dim, dim, 2), dtype=complex)
    for m in range(M):
        train_amp = amplitude_encode(train.points[m])
        block = np.einsum("l,t,s->lts", states[train.labels[m]], train_amp, test_amp)
        amps[m, :, :, :, 0] = np.sqrt(train.weights[m]) * block
    return Statevector(amps.ravel(), layout)


def swap_test_circuit(layout, basis):
    """Gate list applied after state preparation for measurement basis ``basis``."""
    a, l = layout.ancilla_qubit, layout.label_qubit
    gates = [Gate.h(a)]
    if layout.n_data_qubits:
        gates.append(Gate.cswap(a, layout.test_span, layout.train_span))
    gates.append(Gate.h(a))
    if basis == "x":
        gates.append(Gate.h(l))
    elif basis == "y":
        gates += [Gate.sdg(l), Gate.h(l)]
    elif basis != "z":
        raise ValueError(f"unknown basis {basis!r}")
    gates.append(Gate.cnot(a, l))
    return gates


def derive_seed(seed, *key):
    """Child ``SeedSequence`` of ``seed`` addressed by an integer ``key``."""
    return np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))


def run_tomography(test, train, labels, config, key=()):
    """Predicted vector from the three basis circuits.

    Each basis gets a freshly prepared state. Depolarisation, when
    ``config.noise > 0``, acts on the label qubit just before measurement:
    as the exact channel average in ``"exact"`` mode and as per-shot Kraus
    draws in ``"sampled"`` mode. ``key`` addresses the random stream (for
    instance the test point's index) so runs are schedule independent.
    """
    if config.execution == "classical":
        raise ValueError("run_tomography needs a circuit execution mode")
    p = float(config.noise)
    xyz = np.zeros(3)
    for b, basis in enumerate(BASES):
        state = prepare_initial_state(test, train, labels)
        for gate in swap_test_circuit(state.layout, basis):
            state.apply(gate)
        qubit = state.layout.label_qubit
        if config.execution == "exact":
            if p > 0:
                ensemble = depolarize_label_qubit(state, qubit, p, mode="exact")
                xyz[b] = ensemble_expectation_z(ensemble, qubit)
            else:
                xyz[b] = expectation_z(state, qubit)
        else:
            seed = derive_seed(config.seed, *key, b, 0)
            if p > 0:
                xyz[b] = sample_depolarized_z(state, qubit, p, config.shots, seed)
            else:
                xyz[b] = sample_z(state, qubit, config.shots, seed)
    return PredictedVector(xyz)


def _resolve_kernel(kernel):
    if callable(kernel):
        return kernel
    try:
        return KERNELS[kernel]
    except KeyError:
        raise ValueError(f"unknown kernel {kernel!r}") from None


def predicted_classical(test, train, labels, kernel="amplitude"):
    """Predicted vector as a kernel-weighted sum of label vectors.

    ``alpha_i`` is the weighted kernel sum over training points of class ``i``
    and the vector is ``sum_i alpha_i y_i``.
    """
    test = _check_problem(test, train, labels)
    kernel = _resolve_kernel(kernel)
    k = np.array([kernel(test, x) for x in train.points])
    alphas = np.bincount(train.labels, weights=train.weights * k, minlength=labels.n_labels)
    return PredictedVector(alphas @ labels.vectors, alphas)


def predict_vector(test, train, labels, config, key=()):
    """Predicted vector for ``config``, noise included."""
    if config.execution == "classical":
        pv = predicted_classical(test, train, labels, config.encoding)
        if config.noise > 0:
            pv = PredictedVector(scale_prediction(pv.xyz, config.noise), pv.alphas)
        return pv
    return run_tomography(test, train, labels, config, key)


def classify(test, train, labels, config, key=()):
    """Class index assigned to ``test``."""
    return assign(predict_vector(test, train, labels, config, key).xyz, labels)


class SwapTestClassifier(ClassifierMixin, BaseEstimator):
    """Multi-class SWAP-test kernel classifier.

    Training points are stored as-is (uniform weights); each prediction
    reconstructs a Bloch vector that is a kernel-weighted combination of
    per-class label vectors and picks the closest label.

    Parameters
    ----------
    encoding : {"amplitude", "angle"}, default="amplitude"
        Feature map, which fixes the kernel.
    execution : {"exact", "sampled", "classical"}, default="classical"
        How the predicted vector is obtained. Circuit modes require amplitude
        encoding.
    shots : int, default=8192
        Measurements per basis in ``"sampled"`` mode.
    noise : float, default=0.0
        Depolarising probability on the label qubit.
    angle_range : tuple of float, default=(0, pi/2)
        Target range of the min-max scaling applied before angle encoding.
    label_seed : int, default=0
        Seed of the label placement optimiser (more than four classes).
    random_state : int or None, default=None
        Seed for shot sampling.
    classes : array-like or None, default=None
        Full set of class labels. Pins the label placement when a training
        split may miss some classes; inferred from ``y`` when None.
    """

    def __init__(
        self,
        encoding="amplitude",
        execution="classical",
        shots=8192,
        noise=0.0,
        angle_range=(0.0, np.pi / 2),
        label_seed=0,
        random_state=None,
        classes=None,
    ):
        self.encoding = encoding
        self.execution = execution
        self.shots = shots
        self.noise = noise
        self.angle_range = angle_range
        self.label_seed = label_seed
        self.random_state = random_state
        self.classes = classes

    def _config(self):
        return ClassifierConfig(
            encoding=self.encoding,
            execution=self.execution,
            shots=self.shots,
            noise=self.noise,
            label_set=self.label_set_,
            seed=self.random_state,
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float)
        if self.classes is None:
            self.classes_ = unique_labels(y)
        else:
            self.classes_ = np.unique(np.asarray(self.classes))
            unknown = np.setdiff1d(y, self.classes_)
            if unknown.size:
                raise ValueError(f"labels {unknown.tolist()} are not in classes")
        if self.classes_.size < 2:
            raise ValueError("need at least two classes")
        y_idx = np.searchsorted(self.classes_, y)
        self.label_set_ = tammes_placement(self.classes_.size, seed=self.label_seed)
        self.config_ = self._config()
        if self.encoding == "angle":
            self.scaler_ = MinMaxAngleScaler(tuple(self.angle_range)).fit(X)
            X = self.scaler_.transform(X)
        else:
            self.scaler_ = None
        self.train_ = TrainingSet(X, y_idx)
        self.n_features_in_ = X.shape[1]
        return self

    def _transform(self, X):
        check_is_fitted(self, "train_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return self.scaler_.transform(X) if self.scaler_ is not None else X

    def predicted_vectors(self, X, keys=None):
        """Per-row :class:`PredictedVector` objects.

        ``keys`` gives each row's integer seed key (defaults to the row
        index); pass global sample indices to make sampled runs independent
        of how rows are batched.
        """
        X = self._transform(X)
        if keys is None:
            keys = range(X.shape[0])
        train, labels, cfg = self.train_, self.label_set_, self.config_
        if cfg.execution == "classical":
            K = KERNEL_MATRICES[cfg.encoding](X, train.points)
            onehot = np.eye(labels.n_labels)[train.labels]
            alphas = (K * train.weights) @ onehot
            Y = scale_prediction(alphas @ labels.vectors, cfg.noise)
            return [PredictedVector(Y[i], alphas[i]) for i in range(X.shape[0])]
        return [
            run_tomography(x, train, labels, cfg, key=(k,)) for x, k in zip(X, keys)
        ]

    def predict_vector(self, X):
        """Predicted Bloch vectors, shape (n_samples, 3)."""
        return np.array([pv.xyz for pv in self.predicted_vectors(X)])

    def decision_function(self, X):
        """Inner products with each label vector, shape (n_samples, n_classes)."""
        return self.predict_vector(X) @ self.label_set_.vectors.T

    def predict(self, X):
        Y = self.predict_vector(X)
        idx = np.array([assign(v, self.label_set_) for v in Y], dtype=int)
        return self.classes_[idx]
