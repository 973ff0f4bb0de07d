"""Depolarising noise on the label qubit and label-capacity estimates."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .qsim import Gate, expectation_z


class PoleDegenerateError(ValueError):
    """The azimuth of a Bloch vector on the z axis is undefined."""


def _check_p(p):
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarising probability must lie in [0, 1], got {p}")
    return p


def kraus_operators(p):
    """Kraus operators ``sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z``."""
    p = _check_p(p)
    I = np.eye(2, dtype=complex)
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
    Z = np.array([[1, 0], [0, -1]], dtype=complex)
    a, b = np.sqrt(1 - 3 * p / 4), np.sqrt(p / 4)
    return [a * I, b * X, b * Y, b * Z]


def kraus_probabilities(p):
    """Selection probabilities of the I, X, Y, Z branches."""
    p = _check_p(p)
    return np.array([1 - 3 * p / 4, p / 4, p / 4, p / 4])


_BRANCH_GATES = (None, Gate.x, Gate.y, Gate.z)


def depolarize_label_qubit(state, qubit, p, mode="exact", seed=None):
    """Depolarise one qubit of a pure state.

    The result is an ensemble: a list of ``(weight, Statevector)`` pairs whose
    mixture is the channel output. ``mode="exact"`` returns all four Pauli
    branches with their probabilities; ``mode="kraus-sample"`` draws a single
    branch and returns it with weight 1. Zero-weight branches are dropped.
    The input state is never modified.
    """
    probs = kraus_probabilities(p)
    if mode == "exact":
        chosen = [k for k in range(4) if probs[k] > 0]
        weights = probs[chosen]
    elif mode == "kraus-sample":
        rng = np.random.default_rng(seed)
        chosen = [int(rng.choice(4, p=probs))]
        weights = np.ones(1)
    else:
        raise ValueError(f"unknown depolarising mode {mode!r}")
    ensemble = []
    for k, w in zip(chosen, weights):
        branch = state.copy()
        if _BRANCH_GATES[k] is not None:
            branch.apply(_BRANCH_GATES[k](qubit))
        ensemble.append((float(w), branch))
    return ensemble


def ensemble_expectation_z(ensemble, qubit):
    """Weighted ``<Z>`` of a ``(weight, Statevector)`` ensemble."""
    return float(sum(w * expectation_z(s, qubit) for w, s in ensemble))


def scale_prediction(y_pred, p):
    """Shrink a predicted vector by ``1 - p``."""
    p = _check_p(p)
    return (1.0 - p) * np.asarray(y_pred, dtype=float)


def standard_error(expectation, repetitions):
    """Standard error of a +/-1 mean over ``repetitions`` shots.

    With ``q = (expectation + 1) / 2`` this is ``sqrt(4 q (1 - q) / R)``.
    """
    R = np.asarray(repetitions, dtype=float)
    if np.any(R < 1):
        raise ValueError("repetitions must be >= 1")
    q = (np.clip(expectation, -1.0, 1.0) + 1.0) / 2.0
    return np.sqrt(4.0 * q * (1.0 - q) / R)


def angle_gradients(r):
    """Partial derivatives of (theta, phi) with respect to (x, y, z).

    Returns a (2, 3) array: row 0 for theta, row 1 for phi.
    """
    x, y, z = np.asarray(r, dtype=float)
    rho2 = x * x + y * y + z * z
    rxy2 = x * x + y * y
    if rho2 == 0:
        raise PoleDegenerateError("zero vector has no direction")
    if rxy2 <= 1e-300:
        raise PoleDegenerateError(f"vector {r} lies on the z axis; azimuth is undefined")
    rxy = np.sqrt(rxy2)
    dtheta = np.array([x * z / (rho2 * rxy), y * z / (rho2 * rxy), -rxy / rho2])
    dphi = np.array([-y / rxy2, x / rxy2, 0.0])
    return np.vstack([dtheta, dphi])


def uncertainty_ellipsoid(r, repetitions):
    """First-order uncertainty of the polar and azimuthal angles of ``r``.

    Each component of ``r`` is treated as an independent +/-1 mean over
    ``repetitions`` shots.

    Returns
    -------
    delta_theta, delta_phi, area : float
        Angle uncertainties and the ellipse area ``pi * dtheta * dphi``.
    """
    r = np.asarray(r, dtype=float)
    grads = angle_gradients(r)
    ds = standard_error(r, repetitions)
    dtheta, dphi = np.sqrt((grads**2) @ (ds**2))
    return float(dtheta), float(dphi), float(np.pi * dtheta * dphi)


@dataclass
class CapacityEstimate:
    r: list
    repetitions: int
    p: float | None
    delta_theta: float
    delta_phi: float
    ellipsoid_area: float
    n_states: float
    noisy_delta_theta: float | None = None
    noisy_delta_phi: float | None = None
    noisy_area: float | None = None
    noisy_n_states: float | None = None

    def to_dict(self):
        return asdict(self)


def _n_states(r, repetitions):
    dtheta, dphi, area = uncertainty_ellipsoid(r, repetitions)
    return dtheta, dphi, area, 4 * np.pi * float(np.dot(r, r)) / area


def capacity(r, repetitions, p=None):
    """Number of distinguishable label states for measured vector ``r``.

    Bloch-sphere area ``4 pi |r|^2`` over the uncertainty ellipse area. With
    ``p`` given, the same quantity is evaluated at the shrunken vector
    ``(1 - p) r`` (expectations scaled before the shot statistics).
    """
    r = np.asarray(r, dtype=float)
    dtheta, dphi, area, ns = _n_states(r, repetitions)
    est = CapacityEstimate(
        r=r.tolist(),
        repetitions=int(repetitions),
        p=None if p is None else float(p),
        delta_theta=dtheta,
        delta_phi=dphi,
        ellipsoid_area=area,
        n_states=float(ns),
    )
    if p is not None:
        p = _check_p(p)
        if p == 1.0:
            raise PoleDegenerateError("p = 1 shrinks every vector to the origin")
        t, f, a, n = _n_states((1.0 - p) * r, repetitions)
        est.noisy_delta_theta, est.noisy_delta_phi = t, f
        est.noisy_area, est.noisy_n_states = a, float(n)
    return est


def worst_case_factor(p):
    """Worst-case capacity retention ``1 - 5p + 6p^2`` under depolarisation."""
    p = _check_p(p)
    return 1.0 - 5.0 * p + 6.0 * p * p


def sample_depolarized_z(state, qubit, p, shots, seed=None):
    """Shot-sampled ``<Z>`` with an independent Kraus draw on every shot.

    Shots are split over the four Pauli branches by a multinomial draw, then
    each branch's outcomes are sampled from its exact expectation.
    """
    shots = int(shots)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, kraus_probabilities(p))
    total = 0.0
    for k, n in enumerate(counts):
        if n == 0:
            continue
        branch = state.copy()
        if _BRANCH_GATES[k] is not None:
            branch.apply(_BRANCH_GATES[k](qubit))
        q = min(max((expectation_z(branch, qubit) + 1.0) / 2.0, 0.0), 1.0)
        total += 2.0 * rng.binomial(n, q) - n
    return total / shots
