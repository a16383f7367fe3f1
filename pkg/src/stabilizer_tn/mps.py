"""Open-boundary matrix product state for the amplitude vector ``nu``.

Tensor ``q`` has shape ``(chi_left, 2, chi_right)`` and its physical index is
bit ``q`` of the basis label (qubit 0 is the least significant bit of a dense
index). Bond ``k`` sits between sites ``k`` and ``k + 1``.

Two-site gates are applied with the orthogonality center moved onto the
affected pair, so truncating singular values below ``eps * s_max`` is the
optimal local truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import gates
from .exceptions import CapacityError, InvalidSizeError

__all__ = ["MPSState", "TruncationPolicy", "basis_state", "DENSE_LIMIT"]

DENSE_LIMIT = 20


@dataclass(frozen=True)
class TruncationPolicy:
    """Relative singular-value cutoff and optional hard bond cap.

    ``eps = 0`` keeps every singular value, including exact zeros.
    """

    eps: float = 1e-12
    chi_max: int | None = None

    def __post_init__(self) -> None:
        if not self.eps >= 0:
            raise ValueError("eps must be non-negative")
        if self.chi_max is not None and self.chi_max < 1:
            raise ValueError("chi_max must be at least 1")

    @property
    def lossy(self) -> bool:
        return self.chi_max is not None

    def keep(self, s: np.ndarray) -> int:
        """Number of leading singular values to keep from the sorted ``s``."""
        k = s.size
        if self.eps > 0 and s.size and s[0] > 0:
            k = int(np.count_nonzero(s >= self.eps * s[0]))
        if self.chi_max is not None:
            k = min(k, self.chi_max)
        return max(k, 1)


DEFAULT_POLICY = TruncationPolicy()


class MPSState:
    """Chain of rank-3 tensors; mutating methods work in place and return ``self``."""

    def __init__(self, tensors: list[np.ndarray], center: int | None = None):
        if not tensors:
            raise InvalidSizeError("an MPS needs at least one site")
        self.tensors = [np.asarray(t, dtype=complex) for t in tensors]
        for t in self.tensors:
            if t.ndim != 3 or t.shape[1] != 2:
                raise InvalidSizeError("site tensors must have shape (chi_l, 2, chi_r)")
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise InvalidSizeError("boundary bonds must have dimension 1")
        for a, b in zip(self.tensors, self.tensors[1:]):
            if a.shape[2] != b.shape[0]:
                raise InvalidSizeError("adjacent tensors disagree on bond dimension")
        self.center = center

    @property
    def n(self) -> int:
        return len(self.tensors)

    def copy(self) -> MPSState:
        return MPSState([t.copy() for t in self.tensors], self.center)

    def bond_dims(self) -> list[int]:
        return [t.shape[2] for t in self.tensors[:-1]]

    def max_bond(self) -> int:
        return max(self.bond_dims(), default=1)

    def _check_site(self, q: int) -> None:
        if not 0 <= q < self.n:
            raise InvalidSizeError(f"site {q} out of range for {self.n} sites")

    # -- canonical form -------------------------------------------------------

    def _left_orthonormalize(self, i: int) -> None:
        t = self.tensors[i]
        cl, _, cr = t.shape
        q, r = np.linalg.qr(t.reshape(cl * 2, cr))
        self.tensors[i] = q.reshape(cl, 2, -1)
        self.tensors[i + 1] = np.tensordot(r, self.tensors[i + 1], axes=(1, 0))

    def _right_orthonormalize(self, i: int) -> None:
        t = self.tensors[i]
        cl, _, cr = t.shape
        q, r = np.linalg.qr(t.reshape(cl, 2 * cr).T)
        self.tensors[i] = q.T.reshape(-1, 2, cr)
        self.tensors[i - 1] = np.tensordot(self.tensors[i - 1], r.T, axes=(2, 0))

    def move_center(self, site: int) -> None:
        """Make every tensor left of ``site`` left-orthonormal and every one right of it right-orthonormal."""
        self._check_site(site)
        if self.center is None:
            for i in range(site):
                self._left_orthonormalize(i)
            for i in range(self.n - 1, site, -1):
                self._right_orthonormalize(i)
        else:
            for i in range(self.center, site):
                self._left_orthonormalize(i)
            for i in range(self.center, site, -1):
                self._right_orthonormalize(i)
        self.center = site

    # -- gates ----------------------------------------------------------------

    def apply_1q(self, site: int, mat: np.ndarray) -> MPSState:
        """Apply an arbitrary (not necessarily unitary) 2x2 matrix on one site."""
        self._check_site(site)
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (2, 2):
            raise InvalidSizeError("single-site matrix must be 2x2")
        unitary = np.allclose(mat.conj().T @ mat, np.eye(2), atol=1e-12)
        if not unitary and self.center != site:
            self.move_center(site)
        self.tensors[site] = np.einsum("ij,ajb->aib", mat, self.tensors[site])
        return self

    def _apply_adjacent(self, i: int, mat: np.ndarray, tp: TruncationPolicy) -> None:
        """``mat`` acts on sites ``(i, i+1)`` with ``i`` the most significant operand."""
        if self.center is None or self.center not in (i, i + 1):
            self.move_center(i)
        a, b = self.tensors[i], self.tensors[i + 1]
        cl, cr = a.shape[0], b.shape[2]
        theta = np.einsum("aib,bjc->aijc", a, b)
        theta = np.einsum("IJij,aijc->aIJc", mat.reshape(2, 2, 2, 2), theta)
        u, s, vh = np.linalg.svd(theta.reshape(cl * 2, 2 * cr), full_matrices=False)
        k = tp.keep(s)
        self.tensors[i] = u[:, :k].reshape(cl, 2, k)
        self.tensors[i + 1] = (s[:k, None] * vh[:k]).reshape(k, 2, cr)
        self.center = i + 1

    def apply_2q(
        self,
        a: int,
        b: int,
        mat: np.ndarray,
        tp: TruncationPolicy = DEFAULT_POLICY,
        anchor: int | None = None,
    ) -> MPSState:
        """Apply a 4x4 matrix on sites ``(a, b)`` (``a`` most significant operand).

        Non-adjacent operands are made adjacent with SWAPs that move the
        non-``anchor`` operand (default: ``b``) next to the anchor; the SWAPs
        are undone afterwards so the site order is restored.
        """
        self._check_site(a)
        self._check_site(b)
        if a == b:
            raise InvalidSizeError("two-site gate needs distinct sites")
        mat = np.asarray(mat, dtype=complex)
        if mat.shape != (4, 4):
            raise InvalidSizeError("two-site matrix must be 4x4")
        if anchor is None:
            anchor = a
        if anchor not in (a, b):
            raise InvalidSizeError("anchor must be one of the operands")
        mover = b if anchor == a else a
        step = 1 if mover < anchor else -1
        path = list(range(mover, anchor, step))
        # walk the mover until it sits next to the anchor
        swaps = []
        pos = mover
        for nxt in path[1:]:
            lo = min(pos, nxt)
            self._apply_adjacent(lo, gates.SWAP, tp)
            swaps.append(lo)
            pos = nxt
        pos_a, pos_b = (anchor, pos) if anchor == a else (pos, anchor)
        if pos_a < pos_b:
            self._apply_adjacent(pos_a, mat, tp)
        else:
            self._apply_adjacent(pos_b, gates.swap_operands(mat), tp)
        for lo in reversed(swaps):
            self._apply_adjacent(lo, gates.SWAP, tp)
        return self

    def scale(self, factor: complex) -> MPSState:
        site = self.center if self.center is not None else 0
        self.tensors[site] = self.tensors[site] * factor
        return self

    # -- contractions ---------------------------------------------------------

    def expect_pauli(self, xbits, zbits) -> complex:
        """``<nu| X_xbits Z_zbits |nu>`` by transfer-matrix contraction."""
        xbits = np.asarray(xbits, dtype=bool)
        zbits = np.asarray(zbits, dtype=bool)
        if xbits.shape != (self.n,) or zbits.shape != (self.n,):
            raise InvalidSizeError("Pauli bit vectors must match the site count")
        ops = {
            (False, False): gates.I2,
            (True, False): gates.X,
            (False, True): gates.Z,
            (True, True): gates.X @ gates.Z,
        }
        env = np.ones((1, 1), dtype=complex)
        for t, xq, zq in zip(self.tensors, xbits.tolist(), zbits.tolist()):
            op_t = np.einsum("ij,ajb->aib", ops[(xq, zq)], t)
            env = np.einsum("ab,aic,bid->cd", env, t.conj(), op_t)
        return complex(env[0, 0])

    def inner(self, other: MPSState) -> complex:
        """``<self|other>``."""
        if other.n != self.n:
            raise InvalidSizeError("MPS sizes differ")
        env = np.ones((1, 1), dtype=complex)
        for a, b in zip(self.tensors, other.tensors):
            env = np.einsum("ab,aic,bid->cd", env, a.conj(), b)
        return complex(env[0, 0])

    def norm(self) -> float:
        if self.center is not None:
            return float(np.linalg.norm(self.tensors[self.center]))
        return float(np.sqrt(abs(self.inner(self))))

    def normalize(self) -> MPSState:
        nrm = self.norm()
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return self.scale(1 / nrm)

    def to_dense(self) -> np.ndarray:
        """Amplitudes with site ``q`` as bit ``q`` of the index."""
        if self.n > DENSE_LIMIT:
            raise CapacityError(f"dense conversion refused for {self.n} > {DENSE_LIMIT} sites")
        v = self.tensors[0].reshape(2, -1)
        for t in self.tensors[1:]:
            v = np.tensordot(v, t, axes=(1, 0)).reshape(-1, t.shape[2])
        # v is now big-endian in site order; flip to little-endian
        return v.reshape((2,) * self.n).transpose(tuple(range(self.n - 1, -1, -1))).reshape(-1)

    def count_nonzero(self, tol: float = 1e-12) -> int:
        return int(np.count_nonzero(np.abs(self.to_dense()) > tol))

    def to_json(self) -> dict[str, Any]:
        """Per-site shapes and flattened ``[re, im]`` entries (C order)."""
        return {
            "n": self.n,
            "sites": [
                {
                    "shape": list(t.shape),
                    "data": [[float(v.real), float(v.imag)] for v in t.reshape(-1)],
                }
                for t in self.tensors
            ],
        }

    @classmethod
    def from_dense(cls, vec: np.ndarray, tp: TruncationPolicy = DEFAULT_POLICY) -> MPSState:
        """Exact (up to ``tp``) MPS of a little-endian dense vector."""
        vec = np.asarray(vec, dtype=complex)
        n = int(round(np.log2(vec.size)))
        if 2**n != vec.size:
            raise InvalidSizeError("vector length is not a power of two")
        if n > DENSE_LIMIT:
            raise CapacityError("too many sites")
        big = vec.reshape((2,) * n).transpose(tuple(range(n - 1, -1, -1))).reshape(-1)
        tensors = []
        rest = big.reshape(1, -1)
        for _ in range(n - 1):
            cl = rest.shape[0]
            u, s, vh = np.linalg.svd(rest.reshape(cl * 2, -1), full_matrices=False)
            k = tp.keep(s)
            tensors.append(u[:, :k].reshape(cl, 2, k))
            rest = s[:k, None] * vh[:k]
        tensors.append(rest.reshape(rest.shape[0], 2, 1))
        return cls(tensors, center=n - 1)


def basis_state(n: int, bits) -> MPSState:
    """Product state ``|bits>`` with every bond of dimension one."""
    bits = np.asarray(bits, dtype=int)
    if n < 1 or bits.shape != (n,):
        raise InvalidSizeError(f"need {n} bits, got shape {bits.shape}")
    tensors = []
    for b in bits.tolist():
        t = np.zeros((1, 2, 1), dtype=complex)
        t[0, b & 1, 0] = 1.0
        tensors.append(t)
    return MPSState(tensors, center=0)
