"""Projective measurements as branch enumeration or seeded sampling.

Measured qubits stay in the register, collapsed onto the outcome ket.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .state import ALGEBRA_TOL, Label, StateError, StateVector, _frozen

NEGLIGIBLE_PROB = 1e-14
SAMPLE_SUM_TOL = 1e-9

_S = 1 / math.sqrt(2)


@dataclass(frozen=True, eq=False)
class BasisSpec:
    """Orthonormal single-qubit basis {|x>, |y>}, kets given in the {|0>, |1>} basis."""

    x_ket: np.ndarray
    y_ket: np.ndarray
    name: str = ""

    def __post_init__(self):
        x = np.asarray(self.x_ket, dtype=complex).ravel()
        y = np.asarray(self.y_ket, dtype=complex).ravel()
        if x.shape != (2,) or y.shape != (2,):
            raise StateError("basis kets must be 2-vectors")
        gram = np.array([[np.vdot(x, x), np.vdot(x, y)], [np.vdot(y, x), np.vdot(y, y)]])
        if np.max(np.abs(gram - np.eye(2))) >= ALGEBRA_TOL:
            raise StateError(f"basis {self.name!r} is not orthonormal")
        object.__setattr__(self, "x_ket", _frozen(x))
        object.__setattr__(self, "y_ket", _frozen(y))

    def kets(self) -> dict[str, np.ndarray]:
        return {"x": self.x_ket, "y": self.y_ket}


def computational_basis() -> BasisSpec:
    return BasisSpec([1, 0], [0, 1], "computational")


class BellOutcome(enum.Enum):
    PHI_PLUS = "Phi+"
    PHI_MINUS = "Phi-"
    PSI_PLUS = "Psi+"
    PSI_MINUS = "Psi-"

    @property
    def ket(self) -> np.ndarray:
        return _BELL_KETS[self]

    @property
    def bits(self) -> tuple[int, int]:
        """Two-bit classical encoding: (parity, phase)."""
        return _BELL_BITS[self]

    @property
    def is_phi(self) -> bool:
        return self in (BellOutcome.PHI_PLUS, BellOutcome.PHI_MINUS)

    def __str__(self) -> str:
        return self.value


_BELL_KETS = {
    BellOutcome.PHI_PLUS: _frozen([_S, 0, 0, _S]),
    BellOutcome.PHI_MINUS: _frozen([_S, 0, 0, -_S]),
    BellOutcome.PSI_PLUS: _frozen([0, _S, _S, 0]),
    BellOutcome.PSI_MINUS: _frozen([0, _S, -_S, 0]),
}
_BELL_BITS = {
    BellOutcome.PHI_PLUS: (0, 0),
    BellOutcome.PHI_MINUS: (0, 1),
    BellOutcome.PSI_PLUS: (1, 0),
    BellOutcome.PSI_MINUS: (1, 1),
}


@dataclass(frozen=True, eq=False)
class MeasurementBranch:
    outcome_label: str
    probability: float
    post_state: Optional[StateVector]

    @property
    def negligible(self) -> bool:
        return self.post_state is None


def project(state: StateVector, targets: Sequence[Label], ket) -> np.ndarray:
    """Unnormalized amplitudes of ``|ket><ket|`` applied to ``targets``."""
    axes = state.axes(targets)
    k = len(axes)
    ket = np.asarray(ket, dtype=complex).ravel()
    if ket.size != 2 ** k:
        raise StateError(f"ket of size {ket.size} cannot project {k} qubit(s)")
    n = state.n_qubits
    mat = np.moveaxis(state.tensor(), axes, list(range(k))).reshape(2 ** k, -1)
    coeff = ket.conj() @ mat
    out = np.outer(ket, coeff).reshape((2,) * n)
    return np.moveaxis(out, list(range(k)), axes).reshape(-1)


def _branch(label: str, projected: np.ndarray, labels: tuple) -> MeasurementBranch:
    prob = float(np.vdot(projected, projected).real)
    if prob < NEGLIGIBLE_PROB:
        return MeasurementBranch(label, prob, None)
    return MeasurementBranch(label, prob, StateVector(labels, _frozen(projected / math.sqrt(prob))))


def measure_in_basis(state: StateVector, target: Label, basis: BasisSpec) -> list[MeasurementBranch]:
    """Two branches, ``"x"`` then ``"y"``."""
    return [_branch(lab, project(state, [target], ket), state.labels) for lab, ket in basis.kets().items()]


def measure_computational(state: StateVector, target: Label) -> list[MeasurementBranch]:
    """Two branches, ``"0"`` then ``"1"``."""
    return [
        _branch(str(bit), project(state, [target], ket), state.labels)
        for bit, ket in enumerate(([1, 0], [0, 1]))
    ]


def measure_bell(state: StateVector, pair: Sequence[Label]) -> list[MeasurementBranch]:
    """Four branches in ``BellOutcome`` order, labeled by outcome value."""
    pair = tuple(pair)
    if len(pair) != 2:
        raise StateError("a Bell measurement needs exactly two qubits")
    if pair[0] == pair[1]:
        raise StateError(f"Bell measurement on a single qubit {pair[0]!r}")
    return [_branch(b.value, project(state, pair, b.ket), state.labels) for b in BellOutcome]


def make_rng(seed: int) -> np.random.Generator:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool) or not 0 <= seed < 2 ** 64:
        raise StateError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return np.random.default_rng(int(seed))


def sample_branch(branches: Sequence[MeasurementBranch], rng: np.random.Generator) -> MeasurementBranch:
    """Draw one branch with its stated probability. Negligible branches are never drawn."""
    raw = [b.probability for b in branches]
    if not raw or any(not math.isfinite(p) or p < 0 for p in raw):
        raise StateError(f"degenerate probability vector {raw}")
    if abs(math.fsum(raw) - 1.0) > SAMPLE_SUM_TOL:
        raise StateError(f"branch probabilities sum to {math.fsum(raw):.12g}, not 1")
    weights = [0.0 if b.negligible else b.probability for b in branches]
    total = math.fsum(weights)
    u = rng.random() * total
    acc = 0.0
    chosen = None
    for i, w in enumerate(weights):
        if w == 0.0:
            continue
        chosen = i
        acc += w
        if u < acc:
            break
    return branches[chosen]
