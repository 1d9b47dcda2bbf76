"""Probabilistic teleportation of a two-particle entangled state over a
non-maximally entangled three-particle channel, on a dense state-vector simulator."""

from .analysis import (
    BranchReport,
    McEstimate,
    SweepRow,
    closed_form_success,
    monte_carlo,
    report,
    sweep,
)
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
from .protocols import (
    BranchRecord,
    ChannelParams,
    ClassicalMessage,
    CorrectionOp,
    InputParams,
    ParameterError,
    ProtocolResult,
    balanced_basis,
    collective_unitary_phi,
    collective_unitary_psi,
    conclusive_basis,
    correction_scheme1,
    correction_scheme2,
    make_channel,
    make_input,
    run_scheme,
    run_scheme1,
    run_scheme2,
)
from .state import (
    EntangledCutError,
    StateError,
    StateVector,
    UnitaryMatrix,
    apply_unitary,
    extract_subsystem,
    fidelity,
    inner_product,
    make_register,
    tensor,
)

__version__ = "0.1.0"

__all__ = [
    "BranchReport",
    "McEstimate",
    "SweepRow",
    "closed_form_success",
    "monte_carlo",
    "report",
    "sweep",
    "BasisSpec",
    "BellOutcome",
    "MeasurementBranch",
    "make_rng",
    "measure_bell",
    "measure_computational",
    "measure_in_basis",
    "sample_branch",
    "BranchRecord",
    "ChannelParams",
    "ClassicalMessage",
    "CorrectionOp",
    "InputParams",
    "ParameterError",
    "ProtocolResult",
    "balanced_basis",
    "collective_unitary_phi",
    "collective_unitary_psi",
    "conclusive_basis",
    "correction_scheme1",
    "correction_scheme2",
    "make_channel",
    "make_input",
    "run_scheme",
    "run_scheme1",
    "run_scheme2",
    "EntangledCutError",
    "StateError",
    "StateVector",
    "UnitaryMatrix",
    "apply_unitary",
    "extract_subsystem",
    "fidelity",
    "inner_product",
    "make_register",
    "tensor",
]
