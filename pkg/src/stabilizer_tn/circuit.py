"""Line-oriented circuit files.

Grammar, one instruction per line::

    qubits <int>                       # header, first non-comment line
    h q | s q | sdg q | x q | y q | z q | t q | tdg q
    cx a b | cz a b | swap a b
    rx <angle> q | ry <angle> q | rz <angle> q
    measure q                          # Z measurement on qubit q
    expect <pauli-word>                # e.g. XIZ; character q acts on qubit q

``<angle>`` is a decimal literal, ``pi/<int>`` or ``-pi/<int>``. Text after ``#``
is a comment.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .exceptions import StabilizerTNError

__all__ = [
    "Instruction",
    "Circuit",
    "CircuitParseError",
    "MissingHeaderError",
    "UnknownMnemonicError",
    "OperandRangeError",
    "MalformedAngleError",
    "MalformedOperandError",
    "parse",
    "format_circuit",
    "compile_circuit",
    "compile_instruction",
    "ENGINE_OPS",
]

ONE_QUBIT = ("h", "s", "sdg", "x", "y", "z", "t", "tdg", "measure")
TWO_QUBIT = ("cx", "cz", "swap")
ROTATIONS = ("rx", "ry", "rz")
ENGINE_OPS = ("h", "s", "sdg", "x", "y", "z", "cx", "rx", "ry", "rz", "measure", "expect")

_PI_FRACTION = re.compile(r"^(-?)pi/(\d+)$")


class CircuitParseError(StabilizerTNError, ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class MissingHeaderError(CircuitParseError):
    pass


class UnknownMnemonicError(CircuitParseError):
    pass


class OperandRangeError(CircuitParseError):
    pass


class MalformedAngleError(CircuitParseError):
    pass


class MalformedOperandError(CircuitParseError):
    pass


@dataclass(frozen=True)
class Instruction:
    name: str
    qubits: tuple[int, ...] = ()
    angle: float | None = None
    pauli: str | None = None
    line: int | None = field(default=None, compare=False)

    def to_text(self) -> str:
        if self.name == "expect":
            return f"expect {self.pauli}"
        parts = [self.name]
        if self.angle is not None:
            parts.append(repr(float(self.angle)))
        parts.extend(str(q) for q in self.qubits)
        return " ".join(parts)


@dataclass
class Circuit:
    n_qubits: int
    instructions: list[Instruction] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.instructions)


def _parse_angle(token: str, line: int) -> float:
    m = _PI_FRACTION.match(token)
    if m:
        k = int(m.group(2))
        if k == 0:
            raise MalformedAngleError(line, f"division by zero in angle {token!r}")
        value = math.pi / k
        return -value if m.group(1) else value
    try:
        value = float(token)
    except ValueError:
        raise MalformedAngleError(line, f"malformed angle {token!r}") from None
    if not math.isfinite(value):
        raise MalformedAngleError(line, f"angle must be finite, got {token!r}")
    return value


def _parse_qubit(token: str, n: int, line: int) -> int:
    if not token.isdigit():
        raise MalformedOperandError(line, f"qubit operand must be a non-negative integer, got {token!r}")
    q = int(token)
    if q >= n:
        raise OperandRangeError(line, f"operand out of range: qubit {q} in a {n}-qubit circuit")
    return q


def _expect_arity(tokens: list[str], count: int, line: int) -> None:
    if len(tokens) - 1 != count:
        raise MalformedOperandError(
            line, f"{tokens[0]} takes {count} operand(s), got {len(tokens) - 1}"
        )


def parse(text: str) -> Circuit:
    """Parse circuit text; errors carry 1-based line numbers."""
    n: int | None = None
    instructions: list[Instruction] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        tokens = body.split()
        name = tokens[0].lower()
        if name == "qubits":
            if n is not None:
                raise CircuitParseError(lineno, "duplicate qubits header")
            _expect_arity(tokens, 1, lineno)
            if not tokens[1].isdigit() or int(tokens[1]) < 1:
                raise MalformedOperandError(lineno, f"qubit count must be a positive integer, got {tokens[1]!r}")
            n = int(tokens[1])
            continue
        if n is None:
            raise MissingHeaderError(lineno, "missing 'qubits <int>' header before first instruction")
        if name in ONE_QUBIT:
            _expect_arity(tokens, 1, lineno)
            instructions.append(Instruction(name, (_parse_qubit(tokens[1], n, lineno),), line=lineno))
        elif name in TWO_QUBIT:
            _expect_arity(tokens, 2, lineno)
            a = _parse_qubit(tokens[1], n, lineno)
            b = _parse_qubit(tokens[2], n, lineno)
            if a == b:
                raise MalformedOperandError(lineno, f"{name} needs two distinct qubits")
            instructions.append(Instruction(name, (a, b), line=lineno))
        elif name in ROTATIONS:
            _expect_arity(tokens, 2, lineno)
            angle = _parse_angle(tokens[1], lineno)
            q = _parse_qubit(tokens[2], n, lineno)
            instructions.append(Instruction(name, (q,), angle=angle, line=lineno))
        elif name == "expect":
            _expect_arity(tokens, 1, lineno)
            word = tokens[1].upper()
            if len(word) != n or set(word) - set("IXYZ"):
                raise MalformedOperandError(lineno, f"expect needs a word over IXYZ of length {n}, got {tokens[1]!r}")
            instructions.append(Instruction("expect", pauli=word, line=lineno))
        else:
            raise UnknownMnemonicError(lineno, f"unknown mnemonic {tokens[0]!r}")
    if n is None:
        raise MissingHeaderError(max(1, len(text.splitlines())), "missing 'qubits <int>' header")
    return Circuit(n, instructions)


def format_circuit(c: Circuit) -> str:
    """Canonical text form; ``parse(format_circuit(c))`` reproduces ``c``."""
    lines = [f"qubits {c.n_qubits}"]
    lines.extend(instr.to_text() for instr in c.instructions)
    return "\n".join(lines) + "\n"


def compile_instruction(instr: Instruction) -> list[Instruction]:
    """Lower one instruction to the engine primitives in :data:`ENGINE_OPS`."""
    name, qs = instr.name, instr.qubits
    if name == "cz":
        a, b = qs
        return [Instruction("h", (b,)), Instruction("cx", (a, b)), Instruction("h", (b,))]
    if name == "swap":
        a, b = qs
        return [Instruction("cx", (a, b)), Instruction("cx", (b, a)), Instruction("cx", (a, b))]
    if name == "t":
        return [Instruction("rz", qs, angle=math.pi / 4)]
    if name == "tdg":
        return [Instruction("rz", qs, angle=-math.pi / 4)]
    if name in ENGINE_OPS:
        return [Instruction(name, qs, instr.angle, instr.pauli)]
    raise ValueError(f"cannot compile {name!r}")


def compile_circuit(c: Circuit) -> list[Instruction]:
    return [op for instr in c.instructions for op in compile_instruction(instr)]
