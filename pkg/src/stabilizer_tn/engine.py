"""Stabilizer tensor network state: a tableau basis plus an MPS of amplitudes.

The represented state is ``sum_i nu_i d_i |psi_S>`` where ``d_i`` is the product
of the destabilizer generators selected by the bits of ``i``. Clifford gates
only touch the tableau; single-qubit rotations and measurements act on ``nu``
through the plans in :mod:`stabilizer_tn.decomposition`.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import gates, oracle
from .circuit import Circuit, Instruction, compile_instruction
from .decomposition import (
    DecomposedPauli,
    ElementaryOp,
    compile_plan,
    decompose_pauli,
    plan_measurement,
    plan_rotation,
)
from .exceptions import (
    CapacityError,
    ImpossibleOutcomeError,
    InternalConsistencyError,
    InvalidObservableError,
    InvalidSizeError,
)
from .mps import DEFAULT_POLICY, MPSState, TruncationPolicy, basis_state
from .pauli import PauliString, Tableau, identity_tableau, random_clifford

__all__ = [
    "StabilizerTN",
    "MeasurementRecord",
    "new_state",
    "apply_ops",
    "execute",
    "run_circuit",
    "RunReport",
    "chi_experiment",
    "chi_sample",
    "ChiExperimentResult",
    "CLIFFORD_GATES",
    "SNAP_TOL",
    "DETERMINISTIC_TOL",
    "RECONSTRUCT_LIMIT",
]

CLIFFORD_GATES = ("h", "s", "sdg", "x", "y", "z", "cx", "cz", "swap")
SNAP_TOL = 1e-12
DETERMINISTIC_TOL = 1e-10
IMPOSSIBLE_TOL = 1e-12
RECONSTRUCT_LIMIT = 12

# exp(-i k pi/4 P) up to global phase, as tableau gates applied left to right
_QUARTER_TURNS = {
    "Z": {1: ["s"], 2: ["z"], 3: ["sdg"]},
    "X": {1: ["h", "s", "h"], 2: ["x"], 3: ["h", "sdg", "h"]},
    "Y": {1: ["sdg", "h", "s", "h", "s"], 2: ["y"], 3: ["sdg", "h", "sdg", "h", "s"]},
}


@dataclass
class MeasurementRecord:
    observable: PauliString
    outcome: int
    probability: float
    expectation_before: float

    def to_json(self) -> dict:
        return {
            "observable": self.observable.to_label(),
            "outcome": self.outcome,
            "probability": self.probability,
        }


def apply_ops(nu: MPSState, ops: list[ElementaryOp], tp: TruncationPolicy) -> None:
    """Run compiled elementary operations on ``nu``; CNOT targets are routed to their control."""
    for op in ops:
        if len(op.sites) == 1:
            nu.apply_1q(op.sites[0], op.matrix)
        else:
            control, target = op.sites
            nu.apply_2q(control, target, op.matrix, tp, anchor=control)


@dataclass
class StabilizerTN:
    """Full simulator state. Public operations mutate in place and return ``self``."""

    tableau: Tableau
    nu: MPSState
    tp: TruncationPolicy = DEFAULT_POLICY
    rng: np.random.Generator = field(default_factory=np.random.default_rng)
    snap_clifford: bool = True

    def __post_init__(self) -> None:
        if self.tableau.n != self.nu.n:
            raise InvalidSizeError("tableau and amplitude MPS sizes differ")

    @property
    def n(self) -> int:
        return self.tableau.n

    @classmethod
    def new(
        cls,
        n: int,
        seed: int | np.random.SeedSequence | None = None,
        tp: TruncationPolicy | None = None,
        snap_clifford: bool = True,
    ) -> StabilizerTN:
        """``|0...0>``: identity tableau and ``nu = e_0``."""
        return cls(
            identity_tableau(n),
            basis_state(n, np.zeros(n, dtype=int)),
            tp or DEFAULT_POLICY,
            np.random.default_rng(seed),
            snap_clifford,
        )

    def copy(self) -> StabilizerTN:
        rng = np.random.default_rng()
        rng.bit_generator.state = self.rng.bit_generator.state
        return StabilizerTN(self.tableau.copy(), self.nu.copy(), self.tp, rng, self.snap_clifford)

    def max_bond(self) -> int:
        return self.nu.max_bond()

    # -- update rules ---------------------------------------------------------

    def apply_clifford(self, gate: str, *qubits: int) -> StabilizerTN:
        """Conjugate the basis by a Clifford gate; ``nu`` is left untouched."""
        gate = gate.lower()
        if gate == "cnot":
            gate = "cx"
        if gate not in CLIFFORD_GATES:
            raise ValueError(f"{gate!r} is not a Clifford gate")
        self.tableau.apply_gate(gate, *qubits)
        return self

    def apply_rotation(self, axis: str, qubit: int, theta: float) -> StabilizerTN:
        """Apply ``exp(-i theta/2 P)`` for ``P`` = ``X``, ``Y`` or ``Z`` on ``qubit``."""
        axis = axis.upper()
        if axis not in ("X", "Y", "Z"):
            raise ValueError(f"rotation axis must be X, Y or Z, got {axis!r}")
        if not 0 <= qubit < self.n:
            raise InvalidSizeError(f"qubit {qubit} out of range")
        if not math.isfinite(theta):
            raise ValueError("rotation angle must be finite")
        if self.snap_clifford:
            turns = theta / (math.pi / 2)
            k = round(turns)
            if abs(theta - k * math.pi / 2) < SNAP_TOL:
                for g in _QUARTER_TURNS[axis].get(k % 4, []):
                    self.tableau.apply_gate(g, qubit)
                return self
        plan = plan_rotation(self.tableau, PauliString.single(self.n, qubit, axis), theta)
        apply_ops(self.nu, compile_plan(plan), self.tp)
        if self.tp.lossy:
            self.nu.normalize()
        return self

    def decompose(self, p: PauliString) -> DecomposedPauli:
        return decompose_pauli(self.tableau, p)

    def _check_observable(self, p: PauliString) -> None:
        if p.n != self.n:
            raise InvalidSizeError("observable size differs from the state")
        if not p.is_hermitian():
            raise InvalidObservableError(f"{p} is not Hermitian")

    def expectation(self, p: PauliString) -> float:
        """``<psi|p|psi>`` computed as ``alpha <nu| X_d Z_s |nu>``."""
        self._check_observable(p)
        return self._expectation(self.decompose(p))

    def _expectation(self, dec: DecomposedPauli) -> float:
        value = dec.alpha * self.nu.expect_pauli(dec.dbits, dec.sbits)
        if abs(value.imag) > 1e-10:
            raise InternalConsistencyError(f"expectation of a Hermitian Pauli is complex: {value}")
        return float(value.real)

    def measure(self, p: PauliString, forced: int | None = None) -> tuple[StabilizerTN, MeasurementRecord]:
        """Projective measurement of a Hermitian, non-identity Pauli."""
        self._check_observable(p)
        if p.is_identity():
            raise InvalidObservableError("cannot measure the identity")
        dec = self.decompose(p)
        ev = min(max(self._expectation(dec), -1.0), 1.0)
        p_plus = (1 + ev) / 2
        if forced is None:
            outcome = 1 if self.rng.random() < p_plus else -1
        elif forced in (1, -1):
            outcome = forced
        else:
            raise ValueError("forced outcome must be +1 or -1")
        prob = p_plus if outcome == 1 else 1 - p_plus
        if prob < IMPOSSIBLE_TOL:
            raise ImpossibleOutcomeError(f"outcome {outcome:+d} of {p.to_label()} has probability {prob:.3g}")
        record = MeasurementRecord(p.copy(), outcome, prob, ev)
        if abs(ev) >= 1 - DETERMINISTIC_TOL:
            return self, record

        plan = plan_measurement(self.tableau, dec, outcome)
        apply_ops(self.nu, compile_plan(plan), self.tp)
        if dec.dbits.any():
            k = plan.pivot
            self.nu.apply_1q(k, gates.P0)
            self.nu.scale(1 / math.sqrt(prob))
            self.tableau.project_basis(dec, k, outcome)
        else:
            self.nu.scale(1 / math.sqrt(2 * prob))
        if self.tp.lossy:
            self.nu.normalize()
        return self, record

    # -- diagnostics ----------------------------------------------------------

    def reconstruct_dense(self) -> np.ndarray:
        """Dense ``sum_i nu_i d_i |psi_S>`` (qubit 0 least significant)."""
        if self.n > RECONSTRUCT_LIMIT:
            raise CapacityError(f"reconstruction refused for n={self.n} > {RECONSTRUCT_LIMIT}")
        return oracle.basis_vectors(self.tableau) @ self.nu.to_dense()

    def pseudo_stabilizer_rank(self, tol: float = 1e-12) -> int:
        """Number of non-zero amplitudes of ``nu``."""
        return self.nu.count_nonzero(tol)


def new_state(
    n: int,
    seed: int | np.random.SeedSequence | None = None,
    tp: TruncationPolicy | None = None,
    snap_clifford: bool = True,
) -> StabilizerTN:
    return StabilizerTN.new(n, seed, tp, snap_clifford)


def execute(st: StabilizerTN, op: Instruction) -> MeasurementRecord | float | None:
    """Run one engine primitive; returns the measurement record or expectation value, if any."""
    name, qs = op.name, op.qubits
    if name in CLIFFORD_GATES:
        st.apply_clifford(name, *qs)
        return None
    if name in ("rx", "ry", "rz"):
        st.apply_rotation(name[1].upper(), qs[0], float(op.angle))
        return None
    if name == "measure":
        _, record = st.measure(PauliString.single(st.n, qs[0], "Z"))
        return record
    if name == "expect":
        return st.expectation(PauliString.from_label(op.pauli))
    raise ValueError(f"engine cannot execute {name!r}")


@dataclass
class RunReport:
    n: int
    seed: int
    records: list[MeasurementRecord]
    expectations: list[tuple[str, float]]
    chi_trace: list[int]
    pseudo_rank: int | None
    wall_time_ms: float
    state: StabilizerTN | None = field(default=None, repr=False)

    @property
    def max_chi(self) -> int:
        return max(self.chi_trace, default=1)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "n": self.n,
            "seed": self.seed,
            "records": [r.to_json() for r in self.records],
            "expectations": [{"observable": o, "value": v} for o, v in self.expectations],
            "chi_trace": list(self.chi_trace),
            "max_chi": self.max_chi,
        }
        if self.pseudo_rank is not None:
            out["pseudo_rank"] = self.pseudo_rank
        out["wall_time_ms"] = self.wall_time_ms
        return out


def run_circuit(
    circuit: Circuit,
    seed: int | None = None,
    tp: TruncationPolicy | None = None,
    pseudo_rank: bool = False,
    keep_state: bool = False,
) -> RunReport:
    """Execute a parsed circuit from ``|0...0>``.

    ``chi_trace[j]`` is the largest bond of ``nu`` after source instruction ``j``.
    Without a seed one is drawn from OS entropy and reported, so every run can
    be replayed.
    """
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % 2**63)
    start = time.perf_counter()
    st = StabilizerTN.new(circuit.n_qubits, seed, tp)
    records: list[MeasurementRecord] = []
    expectations: list[tuple[str, float]] = []
    trace: list[int] = []
    for instr in circuit.instructions:
        for op in compile_instruction(instr):
            result = execute(st, op)
            if isinstance(result, MeasurementRecord):
                records.append(result)
            elif result is not None:
                expectations.append((op.pauli, result))
        trace.append(st.max_bond())
    rank = st.pseudo_stabilizer_rank() if pseudo_rank else None
    elapsed = (time.perf_counter() - start) * 1e3
    return RunReport(circuit.n_qubits, seed, records, expectations, trace, rank, elapsed, st if keep_state else None)


def chi_sample(
    n: int,
    seed: int,
    index: int,
    tgate_qubit: int | None = None,
    tp: TruncationPolicy | None = None,
) -> tuple[int, float]:
    """One sample: random Clifford basis, then a single T gate.

    Returns the T-gate qubit and ``log2`` of the resulting largest bond.
    The circuit's randomness comes only from ``(seed, index)``.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    tableau = random_clifford(n, rng)
    q = int(rng.integers(n)) if tgate_qubit is None else tgate_qubit
    st = StabilizerTN(tableau, basis_state(n, np.zeros(n, dtype=int)), tp or DEFAULT_POLICY, rng)
    st.apply_rotation("Z", q, math.pi / 4)
    return q, math.log2(st.max_bond())


@dataclass
class ChiExperimentResult:
    n: int
    seed: int
    qubits: list[int]
    samples: list[float]

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))

    @property
    def max(self) -> float:
        return float(np.max(self.samples))

    @property
    def histogram(self) -> dict[float, int]:
        """Counts of each distinct ``log2 chi'`` value, sorted by value."""
        counts = Counter(round(s, 12) for s in self.samples)
        return dict(sorted(counts.items()))


def _chi_task(args: tuple) -> tuple[int, float]:
    return chi_sample(*args)


def chi_experiment(
    n: int,
    circuits: int,
    seed: int = 0,
    tgate_qubit: int | None = None,
    tp: TruncationPolicy | None = None,
    workers: int = 1,
) -> ChiExperimentResult:
    """Distribution of ``log2 chi'`` after one T gate on ``circuits`` random Clifford bases.

    ``tgate_qubit=None`` draws the T qubit uniformly per circuit. With
    ``workers > 1`` circuits run in a process pool; results are ordered by
    circuit index either way.
    """
    if n < 2:
        raise InvalidSizeError("chi_experiment needs n >= 2")
    if circuits < 1:
        raise ValueError("need at least one circuit")
    if tgate_qubit is not None and not 0 <= tgate_qubit < n:
        raise InvalidSizeError(f"T-gate qubit {tgate_qubit} out of range for n={n}")
    tasks = [(n, seed, i, tgate_qubit, tp) for i in range(circuits)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chi_task, tasks, chunksize=max(1, circuits // (4 * workers))))
    else:
        results = [_chi_task(t) for t in tasks]
    return ChiExperimentResult(n, seed, [q for q, _ in results], [s for _, s in results])
