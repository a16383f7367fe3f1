"""Step-wise cross-check of the engine against the dense oracle.

Both simulators run the same circuit side by side. The engine draws each
measurement outcome and the oracle is forced to agree, so the two states stay
comparable after every instruction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gates, oracle
from .circuit import Circuit, Instruction, compile_instruction
from .engine import MeasurementRecord, StabilizerTN, execute
from .mps import TruncationPolicy
from .pauli import PauliString

__all__ = [
    "RANDOM_GATES",
    "FIDELITY_TOL",
    "random_circuit",
    "dense_matrix",
    "VerifyResult",
    "verify_circuit",
    "verify_random",
]

RANDOM_GATES = ("h", "s", "cx", "rx", "ry", "rz", "measure")
FIDELITY_TOL = 1e-9


def random_circuit(n: int, depth: int, rng: np.random.Generator) -> Circuit:
    """``depth`` instructions drawn uniformly from :data:`RANDOM_GATES`.

    Rotation angles are uniform in ``(0, 2 pi)``; ``cx`` is replaced by ``h``
    when ``n == 1``.
    """
    instructions = []
    for _ in range(depth):
        name = RANDOM_GATES[rng.integers(len(RANDOM_GATES))]
        if name == "cx" and n == 1:
            name = "h"
        if name == "cx":
            a, b = rng.choice(n, size=2, replace=False).tolist()
            instructions.append(Instruction("cx", (a, b)))
        elif name in ("rx", "ry", "rz"):
            angle = float(rng.uniform(0.0, 2 * math.pi))
            instructions.append(Instruction(name, (int(rng.integers(n)),), angle=angle))
        else:
            instructions.append(Instruction(name, (int(rng.integers(n)),)))
    return Circuit(n, instructions)


def dense_matrix(instr: Instruction) -> np.ndarray:
    """Textbook matrix of a unitary source instruction."""
    if instr.name in gates.SINGLE_QUBIT:
        return gates.SINGLE_QUBIT[instr.name]
    if instr.name in gates.TWO_QUBIT:
        return gates.TWO_QUBIT[instr.name]
    if instr.name in ("rx", "ry", "rz"):
        return gates.ROTATIONS[instr.name[1].upper()](instr.angle)
    raise ValueError(f"{instr.name!r} has no unitary matrix")


@dataclass
class VerifyResult:
    min_fidelity: float = 1.0
    max_norm_error: float = 0.0
    max_probability_error: float = 0.0
    max_expectation_error: float = 0.0
    n_steps: int = 0
    n_measurements: int = 0

    def merge(self, other: VerifyResult) -> VerifyResult:
        return VerifyResult(
            min(self.min_fidelity, other.min_fidelity),
            max(self.max_norm_error, other.max_norm_error),
            max(self.max_probability_error, other.max_probability_error),
            max(self.max_expectation_error, other.max_expectation_error),
            self.n_steps + other.n_steps,
            self.n_measurements + other.n_measurements,
        )

    @property
    def passed(self) -> bool:
        return self.min_fidelity >= 1 - FIDELITY_TOL


def verify_circuit(
    circuit: Circuit,
    seed: int | np.random.SeedSequence = 0,
    tp: TruncationPolicy | None = None,
) -> VerifyResult:
    """Run ``circuit`` on both simulators and compare after every source instruction.

    Measurement checks: the recorded probability must equal ``(1 + m <O>)/2``
    from the engine's own expectation and agree with the oracle's probability.
    """
    st = StabilizerTN.new(circuit.n_qubits, seed, tp)
    v = oracle.zero_state(circuit.n_qubits)
    res = VerifyResult()
    for instr in circuit.instructions:
        if instr.name == "measure":
            z = PauliString.single(circuit.n_qubits, instr.qubits[0], "Z")
            record = execute(st, compile_instruction(instr)[0])
            assert isinstance(record, MeasurementRecord)
            v, _, prob = oracle.measure_pauli(v, z, forced=record.outcome)
            born = (1 + record.outcome * record.expectation_before) / 2
            res.max_probability_error = max(
                res.max_probability_error,
                abs(record.probability - born),
                abs(record.probability - prob),
            )
            res.max_norm_error = max(res.max_norm_error, abs(st.nu.norm() - 1))
            res.n_measurements += 1
        elif instr.name == "expect":
            p = PauliString.from_label(instr.pauli)
            value = execute(st, Instruction("expect", pauli=instr.pauli))
            res.max_expectation_error = max(
                res.max_expectation_error, abs(value - oracle.expectation(v, p).real)
            )
        else:
            for op in compile_instruction(instr):
                execute(st, op)
            v = oracle.apply_gate(v, dense_matrix(instr), instr.qubits)
        res.min_fidelity = min(res.min_fidelity, oracle.fidelity_up_to_phase(st.reconstruct_dense(), v))
        res.max_norm_error = max(res.max_norm_error, abs(st.nu.norm() - 1))
        res.n_steps += 1
    return res


def verify_random(
    n_values: list[int],
    circuits: int,
    depth: int,
    seed: int = 0,
) -> VerifyResult:
    """Verify ``circuits`` random circuits; circuit ``i`` gets ``n_values[i % len(n_values)]`` qubits.

    Circuit ``i`` is generated and run from seeds derived from ``(seed, i)``.
    """
    total = VerifyResult()
    for i in range(circuits):
        n = n_values[i % len(n_values)]
        gen_seq, run_seq = np.random.SeedSequence([seed, i]).spawn(2)
        circuit = random_circuit(n, depth, np.random.default_rng(gen_seq))
        total = total.merge(verify_circuit(circuit, run_seq))
    return total
