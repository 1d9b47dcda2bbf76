"""Probabilistic teleportation of a|00> + b|11> over the channel alpha|000> + beta|111>.

Register labels follow the particle numbering: 1, 2 (Bob), 3, 4, 5 (Alice)
and the ancilla ``"a"``. Two schemes are provided:

* scheme 1: Bell measurement on (3, 4), then particle 5 measured in the
  channel-matched "conclusive" basis. Succeeds with probability 2 alpha^2 beta^2.
* scheme 2: Bell measurement on (3, 4), a collective unitary on (5, a), an
  ancilla measurement that heralds failure, then particle 5 measured in the
  balanced basis. Succeeds with probability 2 beta^2.

Both run either as an exhaustive branch enumeration or as one sampled
trajectory.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .measurement import (
    BasisSpec,
    BellOutcome,
    MeasurementBranch,
    make_rng,
    measure_bell,
    measure_computational,
    measure_in_basis,
    sample_branch,
)
from .state import (
    I2,
    NORM_INPUT_TOL,
    PAULI_X,
    PAULI_Z,
    StateVector,
    UnitaryMatrix,
    apply_unitary,
    extract_subsystem,
    fidelity,
    make_register,
    tensor,
)

ANCILLA = "a"
BOB = (1, 2)
BELL_PAIR = (3, 4)
# Collective unitaries are written over {|0>5|0>a, |1>5|0>a, |0>5|1>a, |1>5|1>a};
# with big-endian targets that is (ancilla, particle 5).
COLLECTIVE_TARGETS = (ANCILLA, 5)


class ParameterError(ValueError):
    """Channel or input parameters violate a protocol precondition."""


@dataclass(frozen=True)
class ChannelParams:
    """Real channel coefficients with alpha^2 + beta^2 = 1 and 0 <= beta <= alpha."""

    alpha: float
    beta: float

    def __post_init__(self):
        alpha, beta = float(self.alpha), float(self.beta)
        if not (math.isfinite(alpha) and math.isfinite(beta)):
            raise ParameterError("channel coefficients must be finite")
        norm = math.hypot(alpha, beta)
        if abs(norm - 1.0) > NORM_INPUT_TOL:
            raise ParameterError(f"alpha^2 + beta^2 = {norm ** 2:.12g}, must be 1")
        alpha, beta = alpha / norm, beta / norm
        if alpha < 0 or beta < 0:
            raise ParameterError("channel coefficients must be non-negative")
        if beta > alpha:
            raise ParameterError(
                f"beta > alpha ({beta:.6g} > {alpha:.6g}); relabel the channel so the larger "
                "coefficient multiplies |000>"
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def from_alpha_sq(cls, alpha_sq: float) -> ChannelParams:
        alpha_sq = float(alpha_sq)
        if not (math.isfinite(alpha_sq) and 0.0 <= alpha_sq <= 1.0):
            raise ParameterError(f"alpha^2 must lie in [0, 1], got {alpha_sq!r}")
        if alpha_sq == 0.5:
            # keep the maximally entangled limit exactly symmetric
            return cls(math.sqrt(0.5), math.sqrt(0.5))
        return cls(math.sqrt(alpha_sq), math.sqrt(1.0 - alpha_sq))

    @property
    def alpha_sq(self) -> float:
        return self.alpha ** 2

    @property
    def beta_sq(self) -> float:
        return self.beta ** 2


@dataclass(frozen=True)
class InputParams:
    """Complex amplitudes of the teleported state a|00> + b|11>."""

    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        if not all(math.isfinite(v) for v in (a.real, a.imag, b.real, b.imag)):
            raise ParameterError("input amplitudes must be finite")
        norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if abs(norm - 1.0) > NORM_INPUT_TOL:
            raise ParameterError(f"|a|^2 + |b|^2 = {norm ** 2:.12g}, must be 1")
        object.__setattr__(self, "a", a / norm)
        object.__setattr__(self, "b", b / norm)

    def swapped(self) -> InputParams:
        return InputParams(self.b, self.a)


def make_channel(p: ChannelParams) -> StateVector:
    return make_register((1, 2, 3), [p.alpha, 0, 0, 0, 0, 0, 0, p.beta])


def make_input(p: InputParams) -> StateVector:
    return make_register((4, 5), [p.a, 0, 0, p.b])


def target_state(p: InputParams) -> StateVector:
    """The state Bob should end up holding, a|00>_12 + b|11>_12."""
    return make_register(BOB, [p.a, 0, 0, p.b])


def conclusive_basis(p: ChannelParams) -> BasisSpec:
    # inverse of |0> = alpha|x> + beta|y>, |1> = beta|x> - alpha|y>
    return BasisSpec([p.alpha, p.beta], [p.beta, -p.alpha], "conclusive")


def balanced_basis() -> BasisSpec:
    s = 1 / math.sqrt(2)
    return BasisSpec([s, s], [s, -s], "balanced")


def _filter_entries(p: ChannelParams) -> tuple[float, float]:
    if p.alpha <= 0:
        raise ParameterError("alpha must be positive for the collective unitary")
    ratio = p.beta / p.alpha
    return ratio, math.sqrt(max(0.0, 1.0 - ratio * ratio))


def collective_unitary_phi(p: ChannelParams) -> UnitaryMatrix:
    """Collective unitary used after a Phi+- outcome, over ``COLLECTIVE_TARGETS``."""
    r, s = _filter_entries(p)
    return UnitaryMatrix(
        [
            [r, 0, s, 0],
            [0, 1, 0, 0],
            [0, 0, 0, -1],
            [s, 0, -r, 0],
        ],
        "U_phi",
    )


def collective_unitary_psi(p: ChannelParams) -> UnitaryMatrix:
    """Collective unitary used after a Psi+- outcome, over ``COLLECTIVE_TARGETS``."""
    r, s = _filter_entries(p)
    return UnitaryMatrix(
        [
            [0, r, s, 0],
            [1, 0, 0, 0],
            [0, 0, 0, -1],
            [0, s, -r, 0],
        ],
        "U_psi",
    )


PAULIS = {"I": I2, "X": PAULI_X, "Z": PAULI_Z, "ZX": PAULI_Z @ PAULI_X}


@dataclass(frozen=True)
class CorrectionOp:
    """Local Pauli correction: ``factors[0]`` acts on particle 1, ``factors[1]`` on particle 2.

    Factor names come from ``PAULIS``; ``"ZX"`` is the product sigma_z sigma_x.
    """

    factors: tuple[str, str]

    def __post_init__(self):
        if len(self.factors) != 2 or any(f not in PAULIS for f in self.factors):
            raise ValueError(f"unknown correction factors {self.factors}")

    @property
    def matrices(self) -> tuple[UnitaryMatrix, UnitaryMatrix]:
        return PAULIS[self.factors[0]], PAULIS[self.factors[1]]

    def apply(self, state: StateVector) -> StateVector:
        for label, u in zip(BOB, self.matrices):
            state = apply_unitary(state, [label], u)
        return state

    def __str__(self) -> str:
        return "(x)".join(self.factors)


_P, _M = BellOutcome.PHI_PLUS, BellOutcome.PHI_MINUS
_SP, _SM = BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS

# Derived by exhaustive search over the 16 Pauli pairs (see tests); None marks a
# branch whose state depends on the unknown amplitudes and cannot be undone.
SCHEME1_CORRECTIONS: dict[tuple[BellOutcome, str], Optional[CorrectionOp]] = {
    (_P, "x"): None,
    (_P, "y"): CorrectionOp(("Z", "I")),
    (_M, "x"): None,
    (_M, "y"): CorrectionOp(("I", "I")),
    (_SP, "x"): CorrectionOp(("X", "X")),
    (_SP, "y"): None,
    (_SM, "x"): CorrectionOp(("ZX", "X")),
    (_SM, "y"): None,
}

SCHEME2_CORRECTIONS: dict[tuple[BellOutcome, str], CorrectionOp] = {
    (_P, "x"): CorrectionOp(("I", "I")),
    (_P, "y"): CorrectionOp(("Z", "I")),
    (_M, "x"): CorrectionOp(("Z", "I")),
    (_M, "y"): CorrectionOp(("I", "I")),
    (_SP, "x"): CorrectionOp(("X", "X")),
    (_SP, "y"): CorrectionOp(("ZX", "X")),
    (_SM, "x"): CorrectionOp(("ZX", "X")),
    (_SM, "y"): CorrectionOp(("X", "X")),
}


def _check_key(bell: BellOutcome, basis_outcome: str) -> tuple[BellOutcome, str]:
    bell = BellOutcome(bell)
    if basis_outcome not in ("x", "y"):
        raise ValueError(f"basis outcome must be 'x' or 'y', got {basis_outcome!r}")
    return bell, basis_outcome


def correction_scheme1(bell: BellOutcome, basis_outcome: str) -> Optional[CorrectionOp]:
    """Bob's correction for scheme 1, or None when the branch is a failure."""
    return SCHEME1_CORRECTIONS[_check_key(bell, basis_outcome)]


def correction_scheme2(bell: BellOutcome, basis_outcome: str) -> CorrectionOp:
    return SCHEME2_CORRECTIONS[_check_key(bell, basis_outcome)]


@dataclass(frozen=True)
class ClassicalMessage:
    bell_bits: tuple[int, int]
    flag_bits: tuple[int, ...] = ()

    @property
    def total_bits(self) -> int:
        return len(self.bell_bits) + len(self.flag_bits)


@dataclass(frozen=True, eq=False)
class BranchRecord:
    """One leaf of a scheme's measurement tree."""

    leaf_id: int
    scheme: int
    bell: BellOutcome
    ancilla: Optional[int]
    basis: Optional[str]
    probability: float
    post_state: Optional[StateVector]
    success: bool
    message: ClassicalMessage
    correction: Optional[CorrectionOp] = None
    bob_state: Optional[StateVector] = None
    fidelity: Optional[float] = None

    @property
    def negligible(self) -> bool:
        return self.post_state is None

    @property
    def trace(self) -> tuple[str, ...]:
        out = [self.bell.value]
        if self.ancilla is not None:
            out.append(f"a={self.ancilla}")
        if self.basis is not None:
            out.append(self.basis)
        return tuple(out)


@dataclass(frozen=True, eq=False)
class ProtocolResult:
    success: bool
    bob_state: Optional[StateVector]
    fidelity_vs_target: Optional[float]
    message: ClassicalMessage
    branch_trace: list[str] = field(default_factory=list)

    @classmethod
    def from_leaf(cls, leaf: BranchRecord) -> ProtocolResult:
        return cls(leaf.success, leaf.bob_state, leaf.fidelity, leaf.message, list(leaf.trace))


class _Scheme:
    """Measurement tree of one scheme. Nodes are identified by their outcome trace."""

    number: int

    def __init__(self, ch: ChannelParams, inp: InputParams):
        self.ch = ch
        self.inp = inp
        self.target = target_state(inp)

    def root(self) -> StateVector:
        return tensor(make_channel(self.ch), make_input(self.inp))

    def child_labels(self, trace: tuple[str, ...]) -> list[str]:
        raise NotImplementedError

    def expand(self, trace: tuple[str, ...], state: StateVector) -> list[MeasurementBranch]:
        raise NotImplementedError

    def children(self, trace, state) -> list[MeasurementBranch]:
        if state is None:
            return [MeasurementBranch(lab, 0.0, None) for lab in self.child_labels(trace)]
        return self.expand(trace, state)

    def leaf(self, trace: tuple[str, ...], probability: float, state: Optional[StateVector], leaf_id: int = 0) -> BranchRecord:
        raise NotImplementedError

    def _finish(self, state: Optional[StateVector], correction: Optional[CorrectionOp]):
        if state is None or correction is None:
            return None, None
        bob = correction.apply(extract_subsystem(state, BOB))
        return bob, fidelity(bob, self.target)


class Scheme1(_Scheme):
    number = 1

    def child_labels(self, trace):
        if len(trace) == 0:
            return [b.value for b in BellOutcome]
        if len(trace) == 1:
            return ["x", "y"]
        return []

    def expand(self, trace, state):
        if len(trace) == 0:
            return measure_bell(state, BELL_PAIR)
        if len(trace) == 1:
            return measure_in_basis(state, 5, conclusive_basis(self.ch))
        return []

    def leaf(self, trace, probability, state, leaf_id=0):
        bell, basis = BellOutcome(trace[0]), trace[1]
        correction = correction_scheme1(bell, basis)
        bob, fid = self._finish(state, correction)
        return BranchRecord(
            leaf_id=leaf_id,
            scheme=1,
            bell=bell,
            ancilla=None,
            basis=basis,
            probability=probability,
            post_state=state,
            success=correction is not None,
            message=ClassicalMessage(bell.bits, (int(basis == "y"),)),
            correction=correction,
            bob_state=bob,
            fidelity=fid,
        )


class Scheme2(_Scheme):
    number = 2

    def root(self) -> StateVector:
        return tensor(super().root(), make_register([ANCILLA], [1, 0]))

    def child_labels(self, trace):
        if len(trace) == 0:
            return [b.value for b in BellOutcome]
        if len(trace) == 1:
            return ["0", "1"]
        if len(trace) == 2 and trace[1] == "0":
            return ["x", "y"]
        return []

    def expand(self, trace, state):
        if len(trace) == 0:
            return measure_bell(state, BELL_PAIR)
        if len(trace) == 1:
            bell = BellOutcome(trace[0])
            u = collective_unitary_phi(self.ch) if bell.is_phi else collective_unitary_psi(self.ch)
            return measure_computational(apply_unitary(state, COLLECTIVE_TARGETS, u), ANCILLA)
        if len(trace) == 2 and trace[1] == "0":
            return measure_in_basis(state, 5, balanced_basis())
        return []

    def leaf(self, trace, probability, state, leaf_id=0):
        bell, ancilla = BellOutcome(trace[0]), int(trace[1])
        basis = trace[2] if ancilla == 0 else None
        correction = correction_scheme2(bell, basis) if ancilla == 0 else None
        bob, fid = self._finish(state, correction)
        flags = (ancilla,) if basis is None else (ancilla, int(basis == "y"))
        return BranchRecord(
            leaf_id=leaf_id,
            scheme=2,
            bell=bell,
            ancilla=ancilla,
            basis=basis,
            probability=probability,
            post_state=state,
            success=ancilla == 0,
            message=ClassicalMessage(bell.bits, flags),
            correction=correction,
            bob_state=bob,
            fidelity=fid,
        )


SCHEMES = {1: Scheme1, 2: Scheme2}


def build_scheme(scheme: int, ch: ChannelParams, inp: InputParams) -> _Scheme:
    try:
        return SCHEMES[int(scheme)](ch, inp)
    except (KeyError, ValueError, TypeError):
        raise ParameterError(f"scheme must be 1 or 2, got {scheme!r}") from None


def enumerate_leaves(sch: _Scheme) -> list[BranchRecord]:
    leaves: list[BranchRecord] = []

    def walk(trace, prob, state):
        children = sch.children(trace, state)
        if not children:
            leaves.append(sch.leaf(trace, prob, state, leaf_id=len(leaves)))
            return
        for br in children:
            walk(trace + (br.outcome_label,), prob * br.probability, br.post_state)

    walk((), 1.0, sch.root())
    return leaves


class TrajectorySampler:
    """Plays sampled trajectories of one scheme.

    Node expansions are deterministic given the parameters, so they are
    memoized; every trajectory still draws each measurement outcome from
    ``sample_branch`` in protocol order.
    """

    def __init__(self, sch: _Scheme):
        self.sch = sch
        self._root = sch.root()
        self._children: dict[tuple, list[MeasurementBranch]] = {}
        self._leaves: dict[tuple, BranchRecord] = {}

    def play(self, rng: np.random.Generator) -> BranchRecord:
        trace: tuple[str, ...] = ()
        state = self._root
        prob = 1.0
        while True:
            children = self._children.get(trace)
            if children is None:
                children = self._children[trace] = self.sch.children(trace, state)
            if not children:
                break
            br = sample_branch(children, rng)
            trace, state, prob = trace + (br.outcome_label,), br.post_state, prob * br.probability
        leaf = self._leaves.get(trace)
        if leaf is None:
            leaf = self._leaves[trace] = self.sch.leaf(trace, prob, state)
        return leaf


def _run(scheme: int, ch, inp, mode: str, seed: Optional[int], rng) -> Union[list[BranchRecord], ProtocolResult]:
    sch = build_scheme(scheme, ch, inp)
    if mode == "enumerate":
        return enumerate_leaves(sch)
    if mode == "sample":
        if rng is None:
            if seed is None:
                raise ParameterError("sample mode needs a seed or an rng")
            rng = make_rng(seed)
        return ProtocolResult.from_leaf(TrajectorySampler(sch).play(rng))
    raise ParameterError(f"mode must be 'enumerate' or 'sample', got {mode!r}")


def run_scheme1(ch: ChannelParams, inp: InputParams, mode: str = "enumerate", seed: Optional[int] = None, rng=None):
    """Scheme 1: all 8 leaves (``mode="enumerate"``) or one sampled ``ProtocolResult``."""
    return _run(1, ch, inp, mode, seed, rng)


def run_scheme2(ch: ChannelParams, inp: InputParams, mode: str = "enumerate", seed: Optional[int] = None, rng=None):
    """Scheme 2: all 12 leaves (``mode="enumerate"``) or one sampled ``ProtocolResult``."""
    return _run(2, ch, inp, mode, seed, rng)


def run_scheme(scheme: int, ch: ChannelParams, inp: InputParams, mode: str = "enumerate", seed: Optional[int] = None, rng=None):
    return _run(scheme, ch, inp, mode, seed, rng)


def success_probability(leaves: Sequence[BranchRecord]) -> float:
    return math.fsum(leaf.probability for leaf in leaves if leaf.success)
