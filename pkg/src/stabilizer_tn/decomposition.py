"""Decomposition of Pauli operators into the stabilizer basis and compilation of
two-term updates into operations on the amplitude vector ``nu``.

Against a tableau, every Pauli ``P`` is ``alpha * delta_n * sigma_m`` where
``delta_n`` is the product of destabilizer generators selected by ``dbits`` and
``sigma_m`` the product of stabilizer generators selected by ``sbits``. On
``nu`` that operator acts as ``alpha * X_dbits Z_sbits`` (``Z`` applied first).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np

from . import gates
from .exceptions import (
    InternalConsistencyError,
    InvalidObservableError,
    InvalidSizeError,
    UnsupportedGateError,
)
from .pauli import PauliString, Tableau, multiply, phase_exp_of_row

__all__ = [
    "DecomposedPauli",
    "RotationPlan",
    "ElementaryOp",
    "decompose_pauli",
    "rotation_axes",
    "plan_rotation",
    "plan_two_term",
    "plan_measurement",
    "compile_plan",
    "local_conjugation",
]

_REAL_TOL = 1e-12


@dataclass
class DecomposedPauli:
    """``P = i**alpha_exp * delta_dbits * sigma_sbits`` for a given tableau."""

    alpha_exp: int
    dbits: np.ndarray
    sbits: np.ndarray

    @property
    def alpha(self) -> complex:
        return 1j**self.alpha_exp

    @property
    def n(self) -> int:
        return self.dbits.shape[0]

    def is_identity(self) -> bool:
        return not (self.dbits.any() or self.sbits.any())

    def to_pauli(self, t: Tableau) -> PauliString:
        """Rebuild the operator from the generators of ``t``."""
        rows = np.concatenate([np.flatnonzero(self.dbits), t.n + np.flatnonzero(self.sbits)])
        x, z, phase = _row_product(t, rows)
        return PauliString(x, z, phase + self.alpha_exp)


def _row_product(t: Tableau, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """``(x, z, phase_exp)`` of the ordered product of tableau rows."""
    x = np.zeros(t.n, bool)
    z = np.zeros(t.n, bool)
    phase = 0
    for i in rows:
        rx, rz = t.x[i], t.z[i]
        phase += phase_exp_of_row(rx, rz, t.r[i]) + 2 * int(np.count_nonzero(z & rx))
        x = x ^ rx
        z = z ^ rz
    return x, z, phase % 4


def decompose_pauli(t: Tableau, p: PauliString) -> DecomposedPauli:
    """Find ``alpha, dbits, sbits`` with ``p == alpha * delta_dbits * sigma_sbits``.

    ``dbits[i]`` is set when ``p`` anticommutes with ``s_i`` and ``sbits[j]`` when
    it anticommutes with ``d_j``; ``alpha`` follows from comparing phases.
    """
    if p.n != t.n:
        raise InvalidSizeError(f"Pauli on {p.n} qubits, tableau on {t.n}")
    n = t.n
    anti = ((t.x & p.z) ^ (t.z & p.x)).sum(axis=1) % 2 == 1
    dbits, sbits = anti[n:], anti[:n]
    rows = np.concatenate([np.flatnonzero(dbits), n + np.flatnonzero(sbits)])
    x, z, phase = _row_product(t, rows)
    if not (np.array_equal(x, p.x) and np.array_equal(z, p.z)):
        raise InternalConsistencyError("tableau rows do not span the Pauli group")
    return DecomposedPauli((p.phase_exp - phase) % 4, dbits.copy(), sbits.copy())


def rotation_axes(dsum, ssum) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split ``X_dsum Z_ssum`` into disjoint ``X``, ``Y`` and ``Z`` site sets."""
    d = np.asarray(dsum, dtype=bool)
    s = np.asarray(ssum, dtype=bool)
    if d.shape != s.shape:
        raise InvalidSizeError("axis vectors differ in length")
    iy = d & s
    return d ^ iy, iy, s ^ iy


@dataclass
class RotationPlan:
    """An update ``nu -> C (M_frame nu)`` with ``C`` built from one Pauli string.

    For ``kind == "rotation"`` the central operator is
    ``cos(theta/2) I - i*sign*sin(theta/2) X_ix Y_iy Z_iz``; for
    ``kind == "measurement"`` it is ``(I + sign * X_ix Y_iy Z_iz) / sqrt(2)``.
    """

    ix: np.ndarray
    iy: np.ndarray
    iz: np.ndarray
    theta: float
    sign: int
    pivot: int
    frame: PauliString | None = None
    kind: Literal["rotation", "measurement"] = "rotation"
    support: list[int] = field(init=False)

    def __post_init__(self) -> None:
        self.ix = np.asarray(self.ix, dtype=bool)
        self.iy = np.asarray(self.iy, dtype=bool)
        self.iz = np.asarray(self.iz, dtype=bool)
        if (self.ix & self.iy).any() or (self.ix & self.iz).any() or (self.iy & self.iz).any():
            raise InternalConsistencyError("rotation axes overlap")
        self.support = np.flatnonzero(self.ix | self.iy | self.iz).tolist()
        if self.support and self.pivot not in self.support:
            raise InternalConsistencyError("pivot outside the support")

    @property
    def n(self) -> int:
        return self.ix.shape[0]

    def axis_string(self) -> PauliString:
        """``X_ix Y_iy Z_iz`` as a Hermitian :class:`PauliString`."""
        x = self.ix | self.iy
        z = self.iz | self.iy
        return PauliString(x, z, int(np.count_nonzero(self.iy)))

    def central_matrix(self) -> np.ndarray:
        if self.kind == "rotation":
            c, s = np.cos(self.theta / 2), np.sin(self.theta / 2)
            off = -1j * self.sign * s
            return np.array([[c, off], [off, c]], dtype=complex)
        return np.array([[1, self.sign], [self.sign, 1]], dtype=complex) / np.sqrt(2)


def _median_site(sites: list[int]) -> int:
    return sites[(len(sites) - 1) // 2]


def _real_sign(value: complex, what: str) -> int:
    if abs(value.imag) > _REAL_TOL or abs(abs(value.real) - 1) > _REAL_TOL:
        raise InternalConsistencyError(f"{what} is not +-1: {value}")
    return 1 if value.real > 0 else -1


def plan_rotation(t: Tableau, axis: PauliString, theta: float) -> RotationPlan:
    """Plan ``exp(-i theta/2 * axis)`` for a single-qubit Pauli ``axis``."""
    if axis.n != t.n:
        raise InvalidSizeError("axis and tableau sizes differ")
    if axis.weight() != 1 or not axis.is_hermitian():
        raise UnsupportedGateError(
            f"only single-qubit Hermitian rotation axes are supported, got {axis}"
        )
    if not np.isfinite(theta):
        raise ValueError("rotation angle must be finite")
    dec = decompose_pauli(t, axis)
    ix, iy, iz = rotation_axes(dec.dbits, dec.sbits)
    sign = _real_sign(dec.alpha * (-1j) ** int(np.count_nonzero(iy)), "rotation sign")
    support = np.flatnonzero(ix | iy | iz).tolist()
    return RotationPlan(ix, iy, iz, float(theta), sign, _median_site(support))


def plan_two_term(d1, s1, d2, s2, phi1: complex, phi2: complex) -> RotationPlan:
    """Plan a unitary ``phi1 X_d1 Z_s1 + phi2 X_d2 Z_s2`` acting on ``nu``.

    The first term becomes the frame and the remainder a rotation about
    ``X_ix Y_iy Z_iz``. The result is correct up to a global phase.
    """
    d1, s1, d2, s2 = (np.asarray(v, dtype=bool) for v in (d1, s1, d2, s2))
    if abs(abs(phi1) ** 2 + abs(phi2) ** 2 - 1) > 1e-10:
        raise UnsupportedGateError("coefficients are not normalized")
    ix, iy, iz = rotation_axes(d1 ^ d2, s1 ^ s2)
    if not (ix | iy | iz).any():
        raise UnsupportedGateError("both terms are the same Pauli")
    # X_d2 Z_s2 (X_d1 Z_s1)^-1 = (-1)^((s1+s2).d1) X_(d1+d2) Z_(s1+s2)
    flip = (-1) ** int(np.count_nonzero((s1 ^ s2) & d1))
    coeff = phi2 * flip * (-1j) ** int(np.count_nonzero(iy))
    global_phase = phi1 / abs(phi1) if abs(phi1) > 0 else 1.0
    rel = 1j * coeff / global_phase
    if abs(rel.imag) > 1e-10:
        raise UnsupportedGateError("two-term operator is not unitary")
    theta = 2 * float(np.arccos(np.clip(abs(phi1), 0.0, 1.0)))
    sign = 1 if rel.real >= 0 else -1
    support = np.flatnonzero(ix | iy | iz).tolist()
    return RotationPlan(ix, iy, iz, theta, sign, _median_site(support), frame=PauliString(d1, s1, 0))


def plan_measurement(t: Tableau, obs: DecomposedPauli, m: int) -> RotationPlan:
    """Plan the combination ``(I + m * O) / sqrt(2)`` as seen by ``nu``.

    The pivot is the first set bit of ``dbits`` (the site later projected onto
    ``|0>``), or the median site of ``sbits`` when ``dbits`` is empty.
    """
    if obs.n != t.n:
        raise InvalidSizeError("observable and tableau sizes differ")
    if obs.is_identity():
        raise InvalidObservableError("cannot measure the identity")
    if m not in (1, -1):
        raise ValueError("outcome must be +1 or -1")
    ix, iy, iz = rotation_axes(obs.dbits, obs.sbits)
    coeff = m * obs.alpha * (-1j) ** int(np.count_nonzero(iy))
    if abs(coeff.imag) > _REAL_TOL:
        raise InvalidObservableError("observable is not Hermitian")
    sign = _real_sign(coeff, "measurement coefficient")
    if obs.dbits.any():
        pivot = int(np.flatnonzero(obs.dbits)[0])
    else:
        pivot = _median_site(np.flatnonzero(obs.sbits).tolist())
    return RotationPlan(ix, iy, iz, 0.0, sign, pivot, kind="measurement")


class ElementaryOp(NamedTuple):
    """A one-site (``sites=(q,)``) or two-site (``sites=(control, target)``) matrix."""

    sites: tuple[int, ...]
    matrix: np.ndarray
    label: str


def local_conjugation(axis: str) -> np.ndarray:
    """``V`` with ``V P V^dagger == X`` for ``P`` in ``X, Y, Z``."""
    return {"X": gates.I2, "Y": gates.SDG, "Z": gates.H}[axis]


def compile_plan(plan: RotationPlan) -> list[ElementaryOp]:
    """Lower a plan to one- and two-site operations on ``nu``, in application order.

    Layout: frame Paulis, per-site basis changes to ``X``, CNOT cascades from
    both ends of the support into the pivot, the central 2x2 matrix, then the
    mirror image of the cascade and basis changes.
    """
    if not plan.support:
        raise InvalidSizeError("plan has empty support")
    ops: list[ElementaryOp] = []
    if plan.frame is not None:
        for q in np.flatnonzero(plan.frame.x | plan.frame.z).tolist():
            mat = np.eye(2, dtype=complex)
            if plan.frame.z[q]:
                mat = gates.Z @ mat
            if plan.frame.x[q]:
                mat = gates.X @ mat
            ops.append(ElementaryOp((q,), mat, "frame"))

    axes = {q: ("X" if plan.ix[q] else "Y" if plan.iy[q] else "Z") for q in plan.support}
    central = plan.central_matrix()
    if len(plan.support) == 1:
        (q,) = plan.support
        v = local_conjugation(axes[q])
        ops.append(ElementaryOp((q,), v.conj().T @ central @ v, "central"))
        return ops

    pivot = plan.pivot
    basis_change = [
        ElementaryOp((q,), local_conjugation(axes[q]), f"to-X[{axes[q]}]")
        for q in plan.support
        if axes[q] != "X"
    ]
    left = [q for q in plan.support if q < pivot]
    right = [q for q in reversed(plan.support) if q > pivot]
    cascade: list[ElementaryOp] = []
    for side in (left, right):
        for j, target in enumerate(side):
            control = side[j + 1] if j + 1 < len(side) else pivot
            cascade.append(ElementaryOp((control, target), gates.CNOT, "cnot"))

    ops.extend(basis_change)
    ops.extend(cascade)
    ops.append(ElementaryOp((pivot,), central, "central"))
    ops.extend(reversed(cascade))
    ops.extend(ElementaryOp(op.sites, op.matrix.conj().T, "from-X") for op in basis_change)
    return ops
