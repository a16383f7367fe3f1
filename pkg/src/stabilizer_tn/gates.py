"""Textbook gate matrices.

Two-qubit matrices act on ``(a, b)`` operands with basis index ``2 * bit_a + bit_b``
(first operand most significant), so ``CNOT`` is control ``a``, target ``b``.
"""

from __future__ import annotations

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
SDG = S.conj().T
T = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex)
TDG = T.conj().T
P0 = np.array([[1, 0], [0, 0]], dtype=complex)

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


ROTATIONS = {"X": rx, "Y": ry, "Z": rz}

SINGLE_QUBIT = {"h": H, "s": S, "sdg": SDG, "x": X, "y": Y, "z": Z, "t": T, "tdg": TDG}
TWO_QUBIT = {"cx": CNOT, "cz": CZ, "swap": SWAP}


def swap_operands(mat: np.ndarray) -> np.ndarray:
    """Return the 4x4 matrix acting on ``(b, a)`` given one acting on ``(a, b)``."""
    return SWAP @ mat @ SWAP
