"""Dense state vectors over small, labeled qubit registers.

Amplitudes are stored big-endian: the leftmost label is the most significant
bit, so ``amps[k]`` belongs to the bitstring of ``k`` padded to ``n`` bits.
All objects are immutable; every operation returns a new value.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

import numpy as np

NORM_INPUT_TOL = 1e-9
ALGEBRA_TOL = 1e-12
RANK_TOL = 1e-10

Label = Hashable


class StateError(ValueError):
    """Invalid register, label or operator input."""


class EntangledCutError(RuntimeError):
    """A requested subsystem is entangled with the rest of the register."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    labels: tuple
    amps: np.ndarray

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def axis(self, label: Label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise StateError(f"unknown qubit label {label!r}; register has {self.labels}") from None

    def axes(self, labels: Iterable[Label]) -> list[int]:
        labels = list(labels)
        if len(set(labels)) != len(labels):
            raise StateError(f"repeated labels in {labels}")
        return [self.axis(lab) for lab in labels]

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per qubit (read-only view)."""
        return self.amps.reshape((2,) * self.n_qubits)

    def __repr__(self) -> str:
        terms = []
        for k in np.flatnonzero(np.abs(self.amps) > 1e-12):
            bits = format(k, f"0{self.n_qubits}b")
            terms.append(f"({self.amps[k]:.6g})|{bits}>")
        return f"StateVector(labels={self.labels}, {' + '.join(terms) or '0'})"


def _check_labels(labels: Sequence[Label]) -> tuple:
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise StateError(f"duplicate qubit labels in {labels}")
    return labels


def _normalized(labels: tuple, amps: np.ndarray) -> StateVector:
    return StateVector(labels, _frozen(amps / np.linalg.norm(amps)))


def make_register(labels: Sequence[Label], amps: Sequence[complex], tol: float = NORM_INPUT_TOL) -> StateVector:
    """Build a normalized register; the input norm must already be 1 within ``tol``."""
    labels = _check_labels(labels)
    amps = np.asarray(amps, dtype=complex).ravel()
    if amps.size != 2 ** len(labels):
        raise StateError(f"{len(labels)} qubits need {2 ** len(labels)} amplitudes, got {amps.size}")
    if not np.all(np.isfinite(amps)):
        raise StateError("amplitudes must be finite")
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise StateError("zero vector is not a state")
    if abs(norm - 1.0) > tol:
        raise StateError(f"amplitude norm {norm:.12g} is not 1 within {tol:g}")
    return _normalized(labels, amps)


def basis_state(labels: Sequence[Label], bits: str) -> StateVector:
    labels = _check_labels(labels)
    if len(bits) != len(labels) or set(bits) - {"0", "1"}:
        raise StateError(f"bitstring {bits!r} does not match {len(labels)} qubits")
    amps = np.zeros(2 ** len(labels), dtype=complex)
    amps[int(bits, 2)] = 1.0
    return StateVector(labels, _frozen(amps))


def tensor(s1: StateVector, s2: StateVector) -> StateVector:
    overlap = set(s1.labels) & set(s2.labels)
    if overlap:
        raise StateError(f"cannot tensor registers sharing labels {sorted(map(str, overlap))}")
    return _normalized(s1.labels + s2.labels, np.kron(s1.amps, s2.amps))


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """A 2x2 or 4x4 unitary, checked on construction."""

    entries: np.ndarray
    name: str = ""

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 4):
            raise StateError(f"unitary must be 2x2 or 4x4, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise StateError("unitary entries must be finite")
        err = unitarity_error(m)
        if err >= ALGEBRA_TOL:
            raise StateError(f"matrix {self.name or ''} is not unitary: max|U^dag U - I| = {err:.3g}")
        object.__setattr__(self, "entries", _frozen(m))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other: UnitaryMatrix) -> UnitaryMatrix:
        return UnitaryMatrix(self.entries @ other.entries, f"{self.name}{other.name}")


def unitarity_error(m) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


I2 = UnitaryMatrix(np.eye(2), "I")
PAULI_X = UnitaryMatrix([[0, 1], [1, 0]], "X")
PAULI_Z = UnitaryMatrix([[1, 0], [0, -1]], "Z")


def apply_unitary(state: StateVector, targets: Sequence[Label], u: UnitaryMatrix) -> StateVector:
    """Apply ``u`` to ``targets``; ``targets[0]`` is the most significant bit of u's basis."""
    axes = state.axes(targets)
    k = len(axes)
    if u.dim != 2 ** k:
        raise StateError(f"{u.dim}x{u.dim} unitary cannot act on {k} qubit(s)")
    gate = u.entries.reshape((2,) * (2 * k))
    out = np.tensordot(gate, state.tensor(), axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return _normalized(state.labels, out.reshape(-1))


def _check_same_labels(s1: StateVector, s2: StateVector) -> None:
    if s1.labels != s2.labels:
        raise StateError(f"label mismatch: {s1.labels} vs {s2.labels}")


def inner_product(s1: StateVector, s2: StateVector) -> complex:
    """<s1|s2>, conjugate-linear in ``s1``."""
    _check_same_labels(s1, s2)
    return complex(np.vdot(s1.amps, s2.amps))


def fidelity(s1: StateVector, s2: StateVector) -> float:
    f = abs(inner_product(s1, s2)) ** 2
    return float(min(1.0, f))


def extract_subsystem(state: StateVector, keep: Sequence[Label], tol: float = RANK_TOL) -> StateVector:
    """Return the factor of ``state`` on ``keep`` (up to global phase).

    Raises EntangledCutError if ``state`` is not a product across the cut.
    """
    axes = state.axes(keep)
    k = len(axes)
    if k == 0:
        raise StateError("keep must name at least one qubit")
    if k == state.n_qubits:
        return _normalized(tuple(keep), np.moveaxis(state.tensor(), axes, list(range(k))).reshape(-1))
    mat = np.moveaxis(state.tensor(), axes, list(range(k))).reshape(2 ** k, -1)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    if s.size > 1 and s[1] > tol:
        raise EntangledCutError(
            f"qubits {tuple(keep)} are entangled with the rest (second Schmidt coefficient {s[1]:.3g})"
        )
    return _normalized(tuple(keep), u[:, 0])
