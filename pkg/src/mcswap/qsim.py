"""Dense statevector simulator with the handful of gates the classifier needs.

Bit convention: qubit ``q`` is bit ``q`` of the amplitude index, so qubit 0 is
the least-significant bit. Gates mutate the state they are given; callers that
need the original must ``copy()`` first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 22

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_SDG = np.array([[1, 0], [0, -1j]], dtype=complex)

SINGLE_QUBIT_MATRICES = {"H": _H, "X": _X, "Y": _Y, "Z": _Z, "Sdg": _SDG}
PAULIS = {"I": np.eye(2, dtype=complex), "X": _X, "Y": _Y, "Z": _Z}


def _ry(angle):
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class RegisterLayout:
    """Register-to-qubit mapping for the classifier circuit.

    Registers are packed from the least-significant bit upward in the order
    ancilla, test, train, label, index.

    Parameters
    ----------
    n_data_qubits : int
        Width of the test and training registers.
    n_index_qubits : int
        Width of the index register (may be 0 for a single training point).
    """

    n_data_qubits: int
    n_index_qubits: int
    ancilla_qubit: int = field(init=False)
    test_span: tuple = field(init=False)
    train_span: tuple = field(init=False)
    label_qubit: int = field(init=False)
    index_span: tuple = field(init=False)
    total_qubits: int = field(init=False)

    def __post_init__(self):
        n, k = self.n_data_qubits, self.n_index_qubits
        if n < 0 or k < 0:
            raise ValueError("register widths must be non-negative")
        set_ = object.__setattr__
        set_(self, "ancilla_qubit", 0)
        set_(self, "test_span", tuple(range(1, 1 + n)))
        set_(self, "train_span", tuple(range(1 + n, 1 + 2 * n)))
        set_(self, "label_qubit", 1 + 2 * n)
        set_(self, "index_span", tuple(range(2 + 2 * n, 2 + 2 * n + k)))
        set_(self, "total_qubits", 2 + 2 * n + k)

    @classmethod
    def for_problem(cls, n_features, n_train):
        """Layout sized for ``n_features`` amplitudes and ``n_train`` points."""
        return cls(_ceil_log2(n_features), _ceil_log2(n_train))

    def spans(self):
        return {
            "ancilla": (self.ancilla_qubit,),
            "test": self.test_span,
            "train": self.train_span,
            "label": (self.label_qubit,),
            "index": self.index_span,
        }


def _ceil_log2(n):
    if n < 1:
        raise ValueError(f"need a positive size, got {n}")
    return int(n - 1).bit_length()


@dataclass(frozen=True)
class Gate:
    """A gate instruction.

    ``kind`` is one of ``H, Sdg, X, Y, Z, RY`` (single qubit, ``targets`` has
    one entry), ``CNOT`` (``controls=(c,)``, ``targets=(t,)``) or ``CSWAP``
    (``controls=(c,)``, ``targets`` the first span, ``targets2`` the second).
    """

    kind: str
    targets: tuple
    controls: tuple = ()
    targets2: tuple = ()
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        object.__setattr__(self, "controls", tuple(int(q) for q in self.controls))
        object.__setattr__(self, "targets2", tuple(int(q) for q in self.targets2))
        kind = self.kind
        if kind in SINGLE_QUBIT_MATRICES or kind == "RY":
            if len(self.targets) != 1 or self.controls or self.targets2:
                raise ValueError(f"{kind} acts on exactly one qubit")
            if kind == "RY" and self.angle is None:
                raise ValueError("RY needs an angle")
        elif kind == "CNOT":
            if len(self.targets) != 1 or len(self.controls) != 1 or self.targets2:
                raise ValueError("CNOT needs one control and one target")
        elif kind == "CSWAP":
            if len(self.controls) != 1:
                raise ValueError("CSWAP needs exactly one control qubit")
            if len(self.targets) != len(self.targets2):
                raise ValueError("CSWAP spans must have equal length")
        else:
            raise ValueError(f"unknown gate kind {kind!r}")
        operands = self.qubits
        if len(set(operands)) != len(operands):
            raise ValueError(f"overlapping operands in {kind} gate: {operands}")

    @property
    def qubits(self):
        return self.controls + self.targets + self.targets2

    # Convenience constructors.
    @classmethod
    def h(cls, q):
        return cls("H", (q,))

    @classmethod
    def sdg(cls, q):
        return cls("Sdg", (q,))

    @classmethod
    def x(cls, q):
        return cls("X", (q,))

    @classmethod
    def y(cls, q):
        return cls("Y", (q,))

    @classmethod
    def z(cls, q):
        return cls("Z", (q,))

    @classmethod
    def ry(cls, q, angle):
        return cls("RY", (q,), angle=float(angle))

    @classmethod
    def cnot(cls, control, target):
        return cls("CNOT", (target,), controls=(control,))

    @classmethod
    def cswap(cls, control, span_a, span_b):
        return cls("CSWAP", tuple(span_a), controls=(control,), targets2=tuple(span_b))

    def matrix(self):
        """2x2 matrix of a single-qubit gate."""
        if self.kind == "RY":
            return _ry(self.angle)
        return SINGLE_QUBIT_MATRICES[self.kind]


class Statevector:
    """Normalised amplitude array over ``n_qubits`` qubits.

    Attributes
    ----------
    amplitudes : ndarray of complex, shape (2**n_qubits,)
    n_qubits : int
    layout : RegisterLayout or None
    """

    def __init__(self, amplitudes, layout=None):
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        size = amps.shape[0]
        if size == 0 or size & (size - 1):
            raise ValueError(f"amplitude length {size} is not a power of two")
        n_qubits = size.bit_length() - 1
        if layout is not None and layout.total_qubits != n_qubits:
            raise ValueError(
                f"layout expects {layout.total_qubits} qubits, amplitudes give {n_qubits}"
            )
        if n_qubits > MAX_QUBITS:
            raise ValueError(f"{n_qubits} qubits exceeds the dense ceiling of {MAX_QUBITS}")
        norm = np.linalg.norm(amps)
        if norm == 0 or not np.isfinite(norm):
            raise ValueError("cannot normalise a zero or non-finite amplitude vector")
        self.amplitudes = amps / norm
        self.n_qubits = n_qubits
        self.layout = layout

    def copy(self):
        new = object.__new__(Statevector)
        new.amplitudes = self.amplitudes.copy()
        new.n_qubits = self.n_qubits
        new.layout = self.layout
        return new

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def _tensor(self):
        # C-order reshape: axis a holds qubit n-1-a.
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def _axis(self, qubit):
        if not 0 <= qubit < self.n_qubits:
            raise IndexError(f"qubit {qubit} out of range for {self.n_qubits} qubits")
        return self.n_qubits - 1 - qubit

    def apply(self, gate):
        """Apply ``gate`` in place and return ``self``."""
        for q in gate.qubits:
            self._axis(q)
        psi = self._tensor()
        if gate.kind == "CNOT":
            c, t = self._axis(gate.controls[0]), self._axis(gate.targets[0])
            idx = [slice(None)] * self.n_qubits
            idx[c] = 1
            sub = psi[tuple(idx)]
            # Removing the control axis shifts later axes down by one.
            t_sub = t - 1 if t > c else t
            psi[tuple(idx)] = np.flip(sub, axis=t_sub).copy()
        elif gate.kind == "CSWAP":
            c = self._axis(gate.controls[0])
            idx = [slice(None)] * self.n_qubits
            idx[c] = 1
            sub = psi[tuple(idx)]
            perm = list(range(self.n_qubits - 1))
            for qa, qb in zip(gate.targets, gate.targets2):
                a, b = self._axis(qa), self._axis(qb)
                a, b = (a - 1 if a > c else a), (b - 1 if b > c else b)
                perm[a], perm[b] = perm[b], perm[a]
            psi[tuple(idx)] = np.transpose(sub, perm).copy()
        else:
            axis = self._axis(gate.targets[0])
            out = np.tensordot(gate.matrix(), psi, axes=([1], [axis]))
            psi = np.moveaxis(out, 0, axis)
            self.amplitudes = np.ascontiguousarray(psi).reshape(-1)
        return self

    def __repr__(self):
        return f"Statevector(n_qubits={self.n_qubits})"


def init_state(amplitudes, layout=None):
    """Build a :class:`Statevector` by direct amplitude assignment.

    The vector is renormalised on entry; an input whose norm is more than
    ``1e-9`` away from one is still accepted (state preparation upstream may
    work with unnormalised weights), but a zero vector is rejected.
    """
    return Statevector(amplitudes, layout)


def apply_gate(state, gate):
    """Apply ``gate`` to ``state`` in place and return it."""
    return state.apply(gate)


def expectation_z(state, qubit):
    """Exact ``<Z>`` on ``qubit``, i.e. P(bit=0) - P(bit=1)."""
    state._axis(qubit)
    probs = state.probabilities()
    bits = (np.arange(probs.shape[0]) >> qubit) & 1
    return float(np.sum(probs * (1 - 2 * bits)))


def sample_z(state, qubit, shots, seed=None):
    """Estimate ``<Z>`` on ``qubit`` from ``shots`` simulated measurements.

    Returns the mean of ``shots`` independent +/-1 outcomes, drawn with
    P(+1) = (<Z> + 1) / 2. ``seed`` may be an int, a ``SeedSequence`` or a
    ``Generator``.
    """
    return sample_expectation(expectation_z(state, qubit), shots, seed)


def sample_expectation(expectation, shots, seed=None):
    """Mean of ``shots`` +/-1 draws whose exact mean is ``expectation``."""
    shots = int(shots)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    p_plus = min(max((expectation + 1.0) / 2.0, 0.0), 1.0)
    n_plus = rng.binomial(shots, p_plus)
    return (2.0 * n_plus - shots) / shots
