"""Quantum circuit simulation on a stabilizer basis with an MPS of amplitudes.

Clifford gates update a stabilizer tableau only. Non-Clifford rotations and
Pauli measurements are rewritten in that basis and applied to a matrix product
state ``nu`` holding the amplitudes.
"""

from .circuit import Circuit, Instruction, compile_circuit, format_circuit, parse
from .decomposition import DecomposedPauli, compile_plan, decompose_pauli, rotation_axes
from .engine import (
    ChiExperimentResult,
    MeasurementRecord,
    RunReport,
    StabilizerTN,
    chi_experiment,
    new_state,
    run_circuit,
)
from .exceptions import (
    CapacityError,
    ImpossibleOutcomeError,
    InternalConsistencyError,
    InvalidObservableError,
    InvalidSizeError,
    StabilizerTNError,
    UnsupportedGateError,
)
from .mps import MPSState, TruncationPolicy
from .pauli import PauliString, Tableau, identity_tableau, random_clifford

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "Instruction",
    "parse",
    "format_circuit",
    "compile_circuit",
    "DecomposedPauli",
    "decompose_pauli",
    "rotation_axes",
    "compile_plan",
    "StabilizerTN",
    "MeasurementRecord",
    "RunReport",
    "ChiExperimentResult",
    "new_state",
    "run_circuit",
    "chi_experiment",
    "MPSState",
    "TruncationPolicy",
    "PauliString",
    "Tableau",
    "identity_tableau",
    "random_clifford",
    "StabilizerTNError",
    "InvalidSizeError",
    "CapacityError",
    "UnsupportedGateError",
    "InvalidObservableError",
    "ImpossibleOutcomeError",
    "InternalConsistencyError",
]
