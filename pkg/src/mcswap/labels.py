"""Label vectors on the Bloch sphere and the assignment rule."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

DEGENERATE_NORM = 1e-12

_SQ3 = np.sqrt(3.0)
_SQ2 = np.sqrt(2.0)
# Fixed small-L configurations in their canonical orientation.
_FIXED = {
    2: np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]),
    3: np.array([[1.0, 0.0, 0.0], [-0.5, _SQ3 / 2, 0.0], [-0.5, -_SQ3 / 2, 0.0]]),
    4: np.array(
        [
            [0.0, 0.0, 1.0],
            [-_SQ2 / 3, np.sqrt(2.0 / 3.0), -1.0 / 3.0],
            [-_SQ2 / 3, -np.sqrt(2.0 / 3.0), -1.0 / 3.0],
            [2 * _SQ2 / 3, 0.0, -1.0 / 3.0],
        ]
    ),
}


@dataclass
class LabelSet:
    """Unit label vectors with their Bloch angles.

    Attributes
    ----------
    vectors : ndarray, shape (L, 3)
    thetas, phis : ndarray, shape (L,)
        Polar and azimuthal angles of each vector.
    min_pairwise_angle : float
        Smallest angle (radians) between two label vectors.
    """

    vectors: np.ndarray
    thetas: np.ndarray
    phis: np.ndarray
    min_pairwise_angle: float

    @classmethod
    def from_vectors(cls, vectors):
        vectors = np.asarray(vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[1] != 3 or vectors.shape[0] < 2:
            raise ValueError("need at least two 3-vectors")
        angles = np.array([bloch_angles(v) for v in vectors])
        return cls(vectors, angles[:, 0], angles[:, 1], min_pairwise_angle(vectors))

    @property
    def n_labels(self):
        return self.vectors.shape[0]

    def states(self):
        """Single-qubit label states ``cos(t/2)|0> + e^{i p} sin(t/2)|1>``, shape (L, 2)."""
        return np.stack(
            [np.cos(self.thetas / 2), np.exp(1j * self.phis) * np.sin(self.thetas / 2)],
            axis=1,
        )

    def to_dict(self):
        return {
            "n_labels": self.n_labels,
            "vectors": self.vectors.tolist(),
            "thetas": self.thetas.tolist(),
            "phis": self.phis.tolist(),
            "min_pairwise_angle": float(self.min_pairwise_angle),
        }

    @classmethod
    def from_dict(cls, d):
        return cls.from_vectors(d["vectors"])


def min_pairwise_angle(vectors, antipodal=False):
    """Smallest pairwise angle between rows of ``vectors`` (radians).

    With ``antipodal=True`` the rows are treated as lines through the origin,
    so ``u`` and ``-u`` coincide.
    """
    U = np.asarray(vectors, dtype=float)
    U = U / np.linalg.norm(U, axis=1, keepdims=True)
    G = U @ U.T
    if antipodal:
        G = np.abs(G)
    iu = np.triu_indices(U.shape[0], k=1)
    return float(np.arccos(np.clip(G[iu].max(), -1.0, 1.0)))


def _normalize_rows(U):
    return U / np.linalg.norm(U, axis=1, keepdims=True)


def _repulse(U, antipodal, n_iter=1500):
    """Riesz-energy descent with a hardening exponent, projected to the sphere."""
    n = U.shape[0]
    step = 0.1
    for it in range(n_iter):
        power = 2.0 + 30.0 * it / n_iter
        diff = U[:, None, :] - U[None, :, :]
        d2 = np.sum(diff**2, axis=-1) + np.eye(n)
        force = np.sum(diff / d2[..., None] ** ((power + 2) / 2), axis=1)
        if antipodal:
            summ = U[:, None, :] + U[None, :, :]
            s2 = np.sum(summ**2, axis=-1) + np.eye(n)
            force += np.sum(summ / s2[..., None] ** ((power + 2) / 2), axis=1)
        # Remove the radial component; scale so the largest move is ``step``.
        force -= np.sum(force * U, axis=1, keepdims=True) * U
        fmax = np.abs(force).max()
        if fmax > 0:
            U = _normalize_rows(U + step * force / fmax)
        step = max(step * 0.997, 1e-4)
    return U


def _polish(U, antipodal):
    """Maximise the minimum squared chord length with SLSQP."""
    n, dim = U.shape
    iu, ju = np.triu_indices(n, k=1)
    signs = (1.0, -1.0) if antipodal else (1.0,)

    def unpack(v):
        return v[:-1].reshape(n, dim), v[-1]

    def pair_cons(v):
        P, t = unpack(v)
        out = [np.sum((P[iu] - s * P[ju]) ** 2, axis=1) - t for s in signs]
        return np.concatenate(out)

    def pair_jac(v):
        P, _ = unpack(v)
        rows = []
        n_pairs = iu.size
        for s in signs:
            J = np.zeros((n_pairs, n * dim + 1))
            d = 2 * (P[iu] - s * P[ju])
            for k in range(dim):
                J[np.arange(n_pairs), iu * dim + k] = d[:, k]
                J[np.arange(n_pairs), ju * dim + k] = -s * d[:, k]
            J[:, -1] = -1.0
            rows.append(J)
        return np.vstack(rows)

    def norm_cons(v):
        P, _ = unpack(v)
        return np.sum(P**2, axis=1) - 1.0

    def norm_jac(v):
        P, _ = unpack(v)
        J = np.zeros((n, n * dim + 1))
        for k in range(dim):
            J[np.arange(n), np.arange(n) * dim + k] = 2 * P[:, k]
        return J

    t0 = pair_cons(np.append(U.ravel(), 0.0)).min()
    x0 = np.append(U.ravel(), t0)
    grad = np.zeros(n * dim + 1)
    grad[-1] = -1.0
    res = minimize(
        lambda v: -v[-1],
        x0,
        jac=lambda v: grad,
        method="SLSQP",
        constraints=[
            {"type": "ineq", "fun": pair_cons, "jac": pair_jac},
            {"type": "eq", "fun": norm_cons, "jac": norm_jac},
        ],
        options={"maxiter": 500, "ftol": 1e-14},
    )
    P = _normalize_rows(unpack(res.x)[0])
    if min_pairwise_angle(P, antipodal) >= min_pairwise_angle(U, antipodal):
        return P
    return U


def maxmin_directions(n_points, dim, seed=None, antipodal=False, n_restarts=6):
    """Place ``n_points`` unit vectors in ``dim`` dimensions far apart.

    Maximises the minimum pairwise angle (between lines when ``antipodal``)
    by repulsion from several seeded random starts, each followed by an
    SLSQP polish. Returns the best configuration found, shape (n_points, dim).
    """
    if n_points < 1 or dim < 1:
        raise ValueError("need at least one point in at least one dimension")
    rng = np.random.default_rng(seed)
    best, best_angle = None, -np.inf
    for _ in range(n_restarts):
        U = _normalize_rows(rng.standard_normal((n_points, dim)))
        if n_points > 1:
            U = _polish(_repulse(U, antipodal), antipodal)
            angle = min_pairwise_angle(U, antipodal)
        else:
            angle = np.pi
        if angle > best_angle + 1e-12:
            best, best_angle = U, angle
    return best


def _rotation_to_z(v):
    """Rotation matrix taking unit vector ``v`` to (0, 0, 1)."""
    z = np.array([0.0, 0.0, 1.0])
    axis = np.cross(v, z)
    s, c = np.linalg.norm(axis), float(v @ z)
    if s < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    k = axis / s
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * K + (1 - c) * (K @ K)


def canonicalize(vectors):
    """Rotate so the first vector is (0,0,1) and the second has y=0, x>=0."""
    V = np.asarray(vectors, dtype=float)
    V = V @ _rotation_to_z(V[0]).T
    x, y = V[1, 0], V[1, 1]
    a = -np.arctan2(y, x)
    Rz = np.array([[np.cos(a), -np.sin(a), 0], [np.sin(a), np.cos(a), 0], [0, 0, 1]])
    V = V @ Rz.T
    V[0] = [0.0, 0.0, 1.0]
    V[1, 1] = 0.0
    return _normalize_rows(V)


def tammes_placement(n_labels, seed=0):
    """Label vectors solving (or approximating) the Tammes problem.

    For two, three and four labels the known optima are returned in a fixed
    orientation. Larger sets come from :func:`maxmin_directions` and are
    rotated into canonical orientation.

    Parameters
    ----------
    n_labels : int
        Number of classes, 2 <= n_labels <= 64.
    seed : int, optional
        Seed for the optimiser (ignored for n_labels <= 4).
    """
    n_labels = int(n_labels)
    if n_labels < 2:
        raise ValueError(f"need at least two labels, got {n_labels}")
    if n_labels > 64:
        raise ValueError(f"at most 64 labels are supported, got {n_labels}")
    if n_labels in _FIXED:
        return LabelSet.from_vectors(_FIXED[n_labels].copy())
    return LabelSet.from_vectors(_optimized_labels(n_labels, seed).copy())


@lru_cache(maxsize=128)
def _optimized_labels(n_labels, seed):
    V = canonicalize(maxmin_directions(n_labels, 3, seed=seed))
    V.setflags(write=False)
    return V


def bloch_angles(v):
    """Polar and azimuthal angle ``(theta, phi)`` of unit vector ``v``.

    ``phi`` lies in [0, 2*pi) and is 0 at the poles.
    """
    v = np.asarray(v, dtype=float).ravel()
    if v.shape != (3,):
        raise ValueError("expected a 3-vector")
    if abs(np.linalg.norm(v) - 1.0) > 1e-6:
        raise ValueError(f"label vector must be unit norm, got {np.linalg.norm(v)}")
    x, y, z = v
    theta = float(np.arccos(np.clip(z, -1.0, 1.0)))
    if np.hypot(x, y) < 1e-12:
        return theta, 0.0
    phi = float(np.mod(np.arctan2(y, x), 2 * np.pi))
    if phi >= 2 * np.pi:
        phi = 0.0
    return theta, phi


def bloch_vector(theta, phi):
    return np.array(
        [np.cos(phi) * np.sin(theta), np.sin(phi) * np.sin(theta), np.cos(theta)]
    )


def overlaps(y_pred, labels):
    """Inner products of ``y_pred`` with every label vector."""
    return labels.vectors @ np.asarray(y_pred, dtype=float)


def is_degenerate(y_pred):
    return float(np.linalg.norm(y_pred)) < DEGENERATE_NORM


def assign(y_pred, labels):
    """Index of the label vector with the largest inner product with ``y_pred``.

    Ties go to the lowest index. A (near) zero ``y_pred`` carries no
    information and yields class 0; check :func:`is_degenerate` to detect it.
    """
    if is_degenerate(y_pred):
        return 0
    return int(np.argmax(overlaps(y_pred, labels)))
