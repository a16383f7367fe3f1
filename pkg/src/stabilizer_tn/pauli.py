"""Binary-symplectic Pauli algebra and the stabilizer/destabilizer tableau.

A :class:`PauliString` is ``i**phase_exp * prod_q X_q**x[q] Z_q**z[q]``. Note the
product is written with ``X`` to the left of ``Z`` on every site, so ``Y = i X Z``
is stored as ``x=1, z=1, phase_exp=1``.

A :class:`Tableau` stores ``2n`` Hermitian generators in the Aaronson-Gottesman
convention: a row ``(x, z, r)`` is ``(-1)**r`` times the tensor product of
``I, X, Y, Z`` selected by ``(x, z)`` (``x=z=1`` meaning ``Y``). Rows ``0..n-1`` are
destabilizers ``d_i``, rows ``n..2n-1`` the stabilizers ``s_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import InternalConsistencyError, InvalidSizeError

__all__ = [
    "PauliString",
    "Tableau",
    "identity_tableau",
    "commutes",
    "multiply",
    "g",
    "random_clifford",
    "phase_exp_of_row",
]

_PHASE_PREFIX = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_PHASE_LABEL = {0: "+", 1: "+i", 2: "-", 3: "-i"}


def _bits(values: Iterable[int] | np.ndarray) -> np.ndarray:
    arr = np.asarray(values)
    return (arr.astype(np.int64) & 1).astype(bool)


@dataclass(eq=False)
class PauliString:
    """A Pauli operator ``i**phase_exp * X^x Z^z`` on ``n`` qubits."""

    x: np.ndarray
    z: np.ndarray
    phase_exp: int = 0

    def __post_init__(self) -> None:
        self.x = _bits(self.x)
        self.z = _bits(self.z)
        if self.x.ndim != 1 or self.x.shape != self.z.shape:
            raise InvalidSizeError("x and z must be vectors of identical length")
        self.phase_exp = int(self.phase_exp) % 4

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(np.zeros(n, bool), np.zeros(n, bool), 0)

    @classmethod
    def single(cls, n: int, qubit: int, axis: str) -> PauliString:
        """``X``, ``Y`` or ``Z`` on one qubit of an ``n``-qubit register."""
        if not 0 <= qubit < n:
            raise InvalidSizeError(f"qubit {qubit} out of range for n={n}")
        label = ["I"] * n
        label[qubit] = axis.upper()
        return cls.from_label("".join(label))

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        """Parse ``"[+|-][i]PPP"``; character ``q`` of the word acts on qubit ``q``."""
        word = label.lstrip("+-i")
        prefix = label[: len(label) - len(word)]
        if prefix not in _PHASE_PREFIX:
            raise ValueError(f"bad phase prefix in Pauli label {label!r}")
        word = word.upper()
        if not word or set(word) - set("IXYZ"):
            raise ValueError(f"bad Pauli label {label!r}")
        x = np.array([c in "XY" for c in word])
        z = np.array([c in "ZY" for c in word])
        return cls(x, z, _PHASE_PREFIX[prefix] + word.count("Y"))

    def to_label(self) -> str:
        chars = np.array(["I", "X", "Z", "Y"])[self.x.astype(int) + 2 * self.z.astype(int)]
        ny = int(np.count_nonzero(self.x & self.z))
        return _PHASE_LABEL[(self.phase_exp - ny) % 4] + "".join(chars)

    def is_hermitian(self) -> bool:
        return (self.phase_exp - int(np.count_nonzero(self.x & self.z))) % 2 == 0

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def copy(self) -> PauliString:
        return PauliString(self.x.copy(), self.z.copy(), self.phase_exp)

    def __mul__(self, other: PauliString) -> PauliString:
        return multiply(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self.phase_exp == other.phase_exp
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __repr__(self) -> str:
        return f"PauliString({self.to_label()!r})"


def _check_same_n(p: PauliString, q: PauliString) -> None:
    if p.n != q.n:
        raise InvalidSizeError(f"Pauli strings act on {p.n} and {q.n} qubits")


def commutes(p: PauliString, q: PauliString) -> bool:
    """True iff ``p q == q p`` (symplectic inner product is even)."""
    _check_same_n(p, q)
    return int(np.count_nonzero(p.x & q.z) + np.count_nonzero(p.z & q.x)) % 2 == 0


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Operator product ``p * q`` including its phase."""
    _check_same_n(p, q)
    # Z^z1 X^x2 = (-1)^(z1 x2) X^x2 Z^z1 on every site.
    swaps = int(np.count_nonzero(p.z & q.x))
    return PauliString(p.x ^ q.x, p.z ^ q.z, p.phase_exp + q.phase_exp + 2 * swaps)


def g(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent of ``i`` picked up when multiplying Hermitian single-qubit Paulis.

    The left factor is ``(x1, z1)`` and the right one ``(x2, z2)``, both in the
    ``I, X, Y, Z`` convention of the tableau.
    """
    if x1 == 0 and z1 == 0:
        return 0
    if x1 == 1 and z1 == 1:
        return z2 - x2
    if x1 == 1:
        return z2 * (2 * x2 - 1)
    return x2 * (1 - 2 * z2)


def _g_vec(x1: np.ndarray, z1: np.ndarray, x2: np.ndarray, z2: np.ndarray) -> np.ndarray:
    x1, z1, x2, z2 = (a.astype(np.int64) for a in (x1, z1, x2, z2))
    return np.where(
        x1 & z1,
        z2 - x2,
        np.where(x1, z2 * (2 * x2 - 1), np.where(z1, x2 * (1 - 2 * z2), 0)),
    )


def phase_exp_of_row(x: np.ndarray, z: np.ndarray, r: int) -> int:
    """``phase_exp`` of the :class:`PauliString` equal to tableau row ``(x, z, r)``."""
    return (2 * int(r) + int(np.count_nonzero(x & z))) % 4


class Tableau:
    """Destabilizer/stabilizer tableau of an ``n``-qubit stabilizer state.

    All gate updates mutate in place and return ``self``.
    """

    __slots__ = ("n", "x", "z", "r")

    def __init__(self, x: np.ndarray, z: np.ndarray, r: np.ndarray):
        x, z, r = _bits(x), _bits(z), _bits(r)
        if x.ndim != 2 or x.shape != z.shape or x.shape[0] != 2 * x.shape[1]:
            raise InvalidSizeError("tableau arrays must have shape (2n, n)")
        if r.shape != (x.shape[0],):
            raise InvalidSizeError("sign column must have length 2n")
        self.n = x.shape[1]
        self.x, self.z, self.r = x, z, r

    # -- access ---------------------------------------------------------------

    def copy(self) -> Tableau:
        return Tableau(self.x.copy(), self.z.copy(), self.r.copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Tableau):
            return NotImplemented
        return (
            np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
            and np.array_equal(self.r, other.r)
        )

    def _check_row(self, i: int) -> None:
        if not 0 <= i < 2 * self.n:
            raise InvalidSizeError(f"row {i} out of range for {2 * self.n} rows")

    def _check_qubit(self, q: int) -> None:
        if not 0 <= q < self.n:
            raise InvalidSizeError(f"qubit {q} out of range for n={self.n}")

    def row(self, i: int) -> PauliString:
        self._check_row(i)
        return PauliString(self.x[i].copy(), self.z[i].copy(), phase_exp_of_row(self.x[i], self.z[i], self.r[i]))

    def destabilizer(self, i: int) -> PauliString:
        return self.row(i)

    def stabilizer(self, i: int) -> PauliString:
        return self.row(self.n + i)

    def set_row(self, i: int, p: PauliString) -> None:
        self._check_row(i)
        if p.n != self.n:
            raise InvalidSizeError("row length mismatch")
        if not p.is_hermitian():
            raise InternalConsistencyError(f"tableau rows must be Hermitian, got {p}")
        self.x[i], self.z[i] = p.x, p.z
        self.r[i] = ((p.phase_exp - int(np.count_nonzero(p.x & p.z))) % 4) // 2

    def labels(self) -> tuple[list[str], list[str]]:
        """``(destabilizers, stabilizers)`` as signed labels such as ``"+XZ"``."""
        rows = [self.row(i).to_label() for i in range(2 * self.n)]
        return rows[: self.n], rows[self.n :]

    # -- invariants -----------------------------------------------------------

    def symplectic_gram(self) -> np.ndarray:
        """Matrix of pairwise anticommutation (1) / commutation (0) of all rows."""
        xi, zi = self.x.astype(np.int64), self.z.astype(np.int64)
        return (xi @ zi.T + zi @ xi.T) % 2

    def is_valid(self) -> bool:
        """Commutation pattern of a destabilizer/stabilizer pair list.

        ``d_i`` anticommutes with ``s_i`` and everything else commutes; that
        pattern is the symplectic form, which also implies GF(2) independence.
        """
        n = self.n
        expected = np.zeros((2 * n, 2 * n), dtype=np.int64)
        expected[:n, n:] = np.eye(n, dtype=np.int64)
        expected[n:, :n] = np.eye(n, dtype=np.int64)
        return bool(np.array_equal(self.symplectic_gram(), expected))

    # -- row operations -------------------------------------------------------

    def rowsum(self, a: int, b: int) -> Tableau:
        """Replace row ``a`` by the product of rows ``b`` and ``a``.

        Only defined for commuting rows; an anticommuting pair would leave an
        imaginary phase that a sign bit cannot hold.
        """
        self._check_row(a)
        self._check_row(b)
        if a == b:
            raise InvalidSizeError("rowsum needs two different rows")
        self._rowsum_many(np.array([a]), b)
        return self

    def _rowsum_many(self, rows: np.ndarray, b: int) -> None:
        if rows.size == 0:
            return
        total = 2 * self.r[rows].astype(np.int64) + 2 * int(self.r[b])
        total = total + _g_vec(self.x[b][None, :], self.z[b][None, :], self.x[rows], self.z[rows]).sum(axis=1)
        total %= 4
        if np.any(total % 2):
            raise InternalConsistencyError("rowsum of anticommuting rows")
        self.r[rows] = total == 2
        self.x[rows] ^= self.x[b]
        self.z[rows] ^= self.z[b]

    # -- Clifford gates -------------------------------------------------------

    def apply_h(self, a: int) -> Tableau:
        self._check_qubit(a)
        xa, za = self.x[:, a].copy(), self.z[:, a].copy()
        self.r ^= xa & za
        self.x[:, a], self.z[:, a] = za, xa
        return self

    def apply_s(self, a: int) -> Tableau:
        self._check_qubit(a)
        xa = self.x[:, a]
        self.r ^= xa & self.z[:, a]
        self.z[:, a] ^= xa
        return self

    def apply_sdg(self, a: int) -> Tableau:
        self._check_qubit(a)
        xa = self.x[:, a]
        self.r ^= xa & ~self.z[:, a]
        self.z[:, a] ^= xa
        return self

    def apply_cnot(self, a: int, b: int) -> Tableau:
        self._check_qubit(a)
        self._check_qubit(b)
        if a == b:
            raise InvalidSizeError("CNOT control and target must differ")
        xa, xb, za, zb = self.x[:, a], self.x[:, b], self.z[:, a], self.z[:, b]
        self.r ^= xa & zb & ~(xb ^ za)
        self.x[:, b] ^= xa
        self.z[:, a] ^= zb
        return self

    def apply_x(self, a: int) -> Tableau:
        self._check_qubit(a)
        self.r ^= self.z[:, a]
        return self

    def apply_z(self, a: int) -> Tableau:
        self._check_qubit(a)
        self.r ^= self.x[:, a]
        return self

    def apply_y(self, a: int) -> Tableau:
        self._check_qubit(a)
        self.r ^= self.x[:, a] ^ self.z[:, a]
        return self

    def apply_gate(self, name: str, *qubits: int) -> Tableau:
        """Dispatch by lowercase mnemonic (``h, s, sdg, x, y, z, cx, cz, swap``)."""
        name = name.lower()
        if name in ("cx", "cnot"):
            return self.apply_cnot(*qubits)
        if name == "cz":
            a, b = qubits
            return self.apply_h(b).apply_cnot(a, b).apply_h(b)
        if name == "swap":
            a, b = qubits
            return self.apply_cnot(a, b).apply_cnot(b, a).apply_cnot(a, b)
        try:
            method = {
                "h": self.apply_h,
                "s": self.apply_s,
                "sdg": self.apply_sdg,
                "x": self.apply_x,
                "y": self.apply_y,
                "z": self.apply_z,
            }[name]
        except KeyError:
            raise ValueError(f"{name!r} is not a tableau gate") from None
        return method(*qubits)

    # -- measurement basis update ----------------------------------------------

    def project_basis(self, obs, k: int, m: int) -> Tableau:
        """Basis update for projecting onto the ``m`` eigenspace of ``obs``.

        ``obs`` is a :class:`~stabilizer_tn.decomposition.DecomposedPauli` taken
        against this tableau and ``k`` must be the first set bit of its
        destabilizer part.
        """
        n = self.n
        dbits = np.asarray(obs.dbits, dtype=bool)
        sbits = np.asarray(obs.sbits, dtype=bool)
        if not dbits.any():
            raise InvalidSizeError("observable commutes with every stabilizer; no basis update")
        if not 0 <= k < n or not dbits[k] or dbits[:k].any():
            raise InvalidSizeError(f"pivot {k} is not the first set bit of the destabilizer part")
        if m not in (1, -1):
            raise ValueError("outcome must be +1 or -1")
        observable = obs.to_pauli(self)
        stab_rows = n + np.flatnonzero(dbits)
        stab_rows = stab_rows[stab_rows != n + k]
        destab_rows = np.flatnonzero(sbits)
        destab_rows = destab_rows[destab_rows != k]
        self._rowsum_many(np.concatenate([stab_rows, destab_rows]), n + k)
        self.x[k], self.z[k], self.r[k] = self.x[n + k], self.z[n + k], self.r[n + k]
        if m == -1:
            observable = PauliString(observable.x, observable.z, observable.phase_exp + 2)
        self.set_row(n + k, observable)
        return self

    def __repr__(self) -> str:
        d, s = self.labels()
        return f"Tableau(destabilizers={d}, stabilizers={s})"


def identity_tableau(n: int) -> Tableau:
    """Tableau of ``|0...0>``: ``d_i = X_i``, ``s_i = Z_i``, all signs ``+``."""
    if n < 1:
        raise InvalidSizeError("need at least one qubit")
    x = np.zeros((2 * n, n), bool)
    z = np.zeros((2 * n, n), bool)
    x[np.arange(n), np.arange(n)] = True
    z[n + np.arange(n), np.arange(n)] = True
    return Tableau(x, z, np.zeros(2 * n, bool))


def _int_column_to_bits(value: int, length: int) -> np.ndarray:
    raw = value.to_bytes((length + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:length].astype(bool)


def random_clifford(n: int, rng: np.random.Generator, n_gates: int | None = None) -> Tableau:
    """Tableau after ``4 n**2`` uniformly drawn gates from ``{H, S, CNOT}`` on ``|0...0>``.

    Gates and qubits are drawn uniformly; CNOT operands are a uniformly random
    ordered pair of distinct qubits. For ``n == 1`` only ``H`` and ``S`` are drawn.
    The walk runs on bit-packed columns (one Python int per tableau column).
    """
    if n < 1:
        raise InvalidSizeError("need at least one qubit")
    if n_gates is None:
        n_gates = 4 * n * n
    rows = 2 * n
    full = (1 << rows) - 1
    xc = [1 << q for q in range(n)]
    zc = [1 << (n + q) for q in range(n)]
    r = 0
    n_kinds = 3 if n > 1 else 2
    kinds = rng.integers(n_kinds, size=n_gates)
    qa = rng.integers(n, size=n_gates)
    qb = rng.integers(max(n - 1, 1), size=n_gates)
    for kind, a, b in zip(kinds.tolist(), qa.tolist(), qb.tolist()):
        if kind == 0:
            xa, za = xc[a], zc[a]
            r ^= xa & za
            xc[a], zc[a] = za, xa
        elif kind == 1:
            xa = xc[a]
            r ^= xa & zc[a]
            zc[a] ^= xa
        else:
            if b >= a:
                b += 1
            xa, za, xb, zb = xc[a], zc[a], xc[b], zc[b]
            r ^= xa & zb & (xb ^ za ^ full)
            xc[b] = xb ^ xa
            zc[a] = za ^ zb
    x = np.stack([_int_column_to_bits(c, rows) for c in xc], axis=1)
    z = np.stack([_int_column_to_bits(c, rows) for c in zc], axis=1)
    return Tableau(x, z, _int_column_to_bits(r, rows))


def pauli_product(rows: Sequence[PauliString], n: int) -> PauliString:
    """Ordered product ``rows[0] * rows[1] * ...`` (identity when empty)."""
    out = PauliString.identity(n)
    for p in rows:
        out = multiply(out, p)
    return out
