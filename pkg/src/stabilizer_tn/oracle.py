"""Dense statevector reference simulator.

States are plain complex vectors of length ``2**n`` with qubit 0 as the least
significant bit of the index. Everything here is brute force on purpose.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .exceptions import CapacityError, ImpossibleOutcomeError, InternalConsistencyError, InvalidSizeError
from .pauli import PauliString, Tableau

__all__ = [
    "MAX_QUBITS",
    "zero_state",
    "num_qubits",
    "apply_gate",
    "apply_pauli",
    "pauli_matrix",
    "expectation",
    "measure_pauli",
    "fidelity_up_to_phase",
    "schmidt_rank",
    "stabilizer_state",
    "basis_vectors",
    "gram_check",
]

MAX_QUBITS = 20


def _guard(n: int) -> None:
    if n > MAX_QUBITS:
        raise CapacityError(f"dense simulation refused for {n} > {MAX_QUBITS} qubits")


def num_qubits(v: np.ndarray) -> int:
    n = int(v.size).bit_length() - 1
    if v.ndim != 1 or 2**n != v.size:
        raise InvalidSizeError("state length is not a power of two")
    return n


def zero_state(n: int) -> np.ndarray:
    _guard(n)
    v = np.zeros(2**n, dtype=complex)
    v[0] = 1.0
    return v


def apply_gate(v: np.ndarray, mat: np.ndarray, operands: Sequence[int]) -> np.ndarray:
    """Apply a ``2**k`` square matrix; ``operands[0]`` is its most significant qubit."""
    n = num_qubits(v)
    _guard(n)
    k = len(operands)
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (2**k, 2**k):
        raise InvalidSizeError(f"{k}-qubit gate needs a {2**k}x{2**k} matrix")
    if len(set(operands)) != k or any(not 0 <= q < n for q in operands):
        raise InvalidSizeError(f"bad operands {operands} for n={n}")
    psi = v.reshape((2,) * n)
    axes = [n - 1 - q for q in operands]
    out = np.tensordot(mat.reshape((2,) * (2 * k)), psi, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes).reshape(-1)


def _masks(p: PauliString) -> tuple[int, int]:
    weights = 1 << np.arange(p.n, dtype=np.int64)
    return int(weights[p.x].sum()), int(weights[p.z].sum())


def apply_pauli(v: np.ndarray, p: PauliString) -> np.ndarray:
    """``p @ v`` for a vector, or column-wise for a ``(2**n, m)`` matrix."""
    n = v.shape[0].bit_length() - 1
    if p.n != n:
        raise InvalidSizeError("Pauli and state sizes differ")
    xmask, zmask = _masks(p)
    idx = np.arange(2**n, dtype=np.int64)
    signs = 1 - 2 * (np.bitwise_count(idx & zmask).astype(np.int64) & 1)
    factor = (1j**p.phase_exp) * signs
    out = np.empty_like(v, dtype=complex)
    if v.ndim == 1:
        out[idx ^ xmask] = factor * v
    else:
        out[idx ^ xmask] = factor[:, None] * v
    return out


def pauli_matrix(p: PauliString) -> np.ndarray:
    """Dense matrix via Kronecker products (highest qubit leftmost)."""
    _guard(p.n)
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    out = np.ones((1, 1), dtype=complex)
    for q in range(p.n - 1, -1, -1):
        site = np.eye(2, dtype=complex)
        if p.x[q]:
            site = site @ x
        if p.z[q]:
            site = site @ z
        out = np.kron(out, site)
    return (1j**p.phase_exp) * out


def expectation(v: np.ndarray, p: PauliString) -> complex:
    return complex(np.vdot(v, apply_pauli(v, p)))


def measure_pauli(
    v: np.ndarray,
    p: PauliString,
    forced: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, int, float]:
    """Projective measurement of a Hermitian Pauli.

    Outcome ``+1`` is chosen when one uniform draw falls below ``(1 + <p>)/2``.
    Returns the normalized post-measurement state, the outcome and its probability.
    """
    ev = expectation(v, p).real
    p_plus = min(max((1 + ev) / 2, 0.0), 1.0)
    if forced is None:
        if rng is None:
            raise ValueError("need an rng or a forced outcome")
        outcome = 1 if rng.random() < p_plus else -1
    else:
        outcome = int(forced)
    prob = p_plus if outcome == 1 else 1 - p_plus
    if prob < 1e-12:
        raise ImpossibleOutcomeError(f"outcome {outcome} has probability {prob:.3g}")
    out = (v + outcome * apply_pauli(v, p)) / 2
    return out / np.linalg.norm(out), outcome, prob


def fidelity_up_to_phase(a: np.ndarray, b: np.ndarray) -> float:
    """``|<a|b>|**2`` after normalizing both vectors."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(min(abs(np.vdot(a, b)) ** 2 / (na * nb) ** 2, 1.0))


def schmidt_rank(v: np.ndarray, cut: int, tol: float = 1e-10) -> int:
    """Schmidt rank between qubits ``0..cut-1`` and ``cut..n-1``."""
    n = num_qubits(v)
    if not 0 < cut < n:
        raise InvalidSizeError(f"cut must lie strictly between 0 and {n}")
    s = np.linalg.svd(v.reshape(2 ** (n - cut), 2**cut), compute_uv=False)
    return int(np.count_nonzero(s > tol))


def stabilizer_state(t: Tableau, seed: int = 0) -> np.ndarray:
    """The state stabilized by the rows ``n..2n-1`` of ``t``.

    A seeded random vector is projected with ``prod (I + s_i)/2``; the global
    phase is fixed so the first non-negligible amplitude is real and positive.
    """
    n = t.n
    _guard(n)
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    for i in range(n):
        v = (v + apply_pauli(v, t.stabilizer(i))) / 2
    nrm = np.linalg.norm(v)
    if nrm < 1e-8:
        raise InternalConsistencyError("stabilizer projection vanished; tableau is inconsistent")
    v /= nrm
    lead = np.flatnonzero(np.abs(v) > 1e-8)[0]
    return v * (abs(v[lead]) / v[lead])


def basis_vectors(t: Tableau, psi_s: np.ndarray | None = None) -> np.ndarray:
    """Matrix whose column ``j`` is ``d_j |psi_S>`` (bit ``i`` of ``j`` selects ``d_i``)."""
    if psi_s is None:
        psi_s = stabilizer_state(t)
    cols = psi_s[:, None]
    for i in range(t.n):
        cols = np.concatenate([cols, apply_pauli(cols, t.destabilizer(i))], axis=1)
    return cols


def gram_check(t: Tableau) -> float:
    """Largest entry of ``|B^dagger B - I|`` over the stabilizer basis of ``t``."""
    if t.n > 5:
        raise CapacityError("gram_check is limited to n <= 5")
    b = basis_vectors(t)
    return float(np.abs(b.conj().T @ b - np.eye(b.shape[1])).max())
