import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stabilizer_tn import gates, oracle
from stabilizer_tn.circuit import (
    Circuit,
    CircuitParseError,
    Instruction,
    MalformedAngleError,
    MalformedOperandError,
    MissingHeaderError,
    OperandRangeError,
    UnknownMnemonicError,
    compile_circuit,
    format_circuit,
    parse,
)
from stabilizer_tn.verify import dense_matrix, random_circuit


def dense_run(n, instrs):
    rng = np.random.default_rng(0)
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    for ins in instrs:
        v = oracle.apply_gate(v, dense_matrix(ins), ins.qubits)
    return v


class TestParse:
    def test_bell(self):
        c = parse("qubits 2\nh 0\ncx 0 1")
        assert c.n_qubits == 2
        assert c.instructions == [Instruction("h", (0,)), Instruction("cx", (0, 1))]

    def test_angle_forms(self):
        c = parse("qubits 1\nrz pi/4 0\nrx -pi/2 0\nry 0.125 0\nrz -1e-3 0")
        assert [i.angle for i in c.instructions] == [math.pi / 4, -math.pi / 2, 0.125, -1e-3]

    def test_comments_and_blank_lines(self):
        c = parse("# header comment\n\nqubits 2   # two\n  h 1 # tail\n")
        assert c.instructions == [Instruction("h", (1,))]
        assert c.instructions[0].line == 4

    def test_expect_and_measure(self):
        c = parse("qubits 3\nmeasure 2\nexpect XIZ")
        assert c.instructions[0] == Instruction("measure", (2,))
        assert c.instructions[1].pauli == "XIZ"

    def test_out_of_range(self):
        with pytest.raises(OperandRangeError) as exc:
            parse("qubits 2\ncx 0 2")
        assert exc.value.line == 2
        assert "line 2" in str(exc.value)

    def test_unknown(self):
        with pytest.raises(UnknownMnemonicError) as exc:
            parse("qubits 2\nh 0\nfoo 1")
        assert exc.value.line == 3

    def test_missing_header(self):
        with pytest.raises(MissingHeaderError) as exc:
            parse("# c\nh 0")
        assert exc.value.line == 2
        with pytest.raises(MissingHeaderError):
            parse("")

    @pytest.mark.parametrize("angle", ["pi", "pi/x", "2pi/3", "pi/0", "abc", "nan", "inf"])
    def test_malformed_angle(self, angle):
        with pytest.raises(MalformedAngleError) as exc:
            parse(f"qubits 1\nrz {angle} 0")
        assert exc.value.line == 2

    @pytest.mark.parametrize(
        "text",
        ["qubits 2\ncx 0 0", "qubits 2\nh", "qubits 2\nh 0 1", "qubits 0", "qubits 2\nexpect XYZ", "qubits 2\nh -1"],
    )
    def test_malformed_operands(self, text):
        with pytest.raises(MalformedOperandError):
            parse(text)

    def test_duplicate_header(self):
        with pytest.raises(CircuitParseError):
            parse("qubits 2\nqubits 3")

    def test_errors_are_distinct(self):
        kinds = {UnknownMnemonicError, OperandRangeError, MissingHeaderError, MalformedAngleError}
        assert len(kinds) == 4
        assert all(issubclass(k, CircuitParseError) for k in kinds)


class TestFormat:
    def test_roundtrip_example(self):
        text = "qubits 3\nh 0\ncx 0 2\nrz 0.7853981633974483 1\nmeasure 1\nexpect ZZI\n"
        assert format_circuit(parse(text)) == text

    @given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(0, 40))
    def test_roundtrip_random(self, seed, n, depth):
        c = random_circuit(n, depth, np.random.default_rng(seed))
        text = format_circuit(c)
        assert parse(text).instructions == c.instructions
        assert format_circuit(parse(text)) == text


class TestCompile:
    def test_t(self):
        (op,) = compile_circuit(parse("qubits 1\nt 0"))
        assert op.name == "rz" and op.angle == math.pi / 4
        (op,) = compile_circuit(parse("qubits 1\ntdg 0"))
        assert op.angle == -math.pi / 4

    def test_swap_is_three_cnots(self):
        ops = compile_circuit(parse("qubits 3\nswap 0 2"))
        assert [(o.name, o.qubits) for o in ops] == [("cx", (0, 2)), ("cx", (2, 0)), ("cx", (0, 2))]
        u = np.eye(8, dtype=complex)
        for k in range(8):
            u[:, k] = dense_run_single(u[:, k], ops)
        ref = np.eye(8, dtype=complex)
        for k in range(8):
            ref[:, k] = oracle.apply_gate(ref[:, k], gates.SWAP, (0, 2))
        np.testing.assert_allclose(u, ref)

    def test_cz(self):
        ops = compile_circuit(parse("qubits 2\ncz 0 1"))
        u = np.eye(4, dtype=complex)
        for k in range(4):
            u[:, k] = dense_run_single(u[:, k], ops)
        np.testing.assert_allclose(u, np.diag([1, 1, 1, -1]), atol=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_semantics_preserved(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        names = ["h", "s", "sdg", "x", "y", "z", "t", "tdg", "cx", "cz", "swap", "rx", "ry", "rz"]
        instrs = []
        for _ in range(25):
            name = names[rng.integers(len(names))]
            if name in ("cx", "cz", "swap"):
                instrs.append(Instruction(name, tuple(rng.choice(n, 2, replace=False).tolist())))
            elif name.startswith("r"):
                instrs.append(Instruction(name, (int(rng.integers(n)),), angle=float(rng.uniform(0, 6))))
            else:
                instrs.append(Instruction(name, (int(rng.integers(n)),)))
        src = dense_run(n, instrs)
        out = dense_run(n, compile_circuit(Circuit(n, instrs)))
        assert oracle.fidelity_up_to_phase(src, out) >= 1 - 1e-12

    def test_measure_and_expect_pass_through(self):
        ops = compile_circuit(parse("qubits 2\nmeasure 1\nexpect XX"))
        assert [o.name for o in ops] == ["measure", "expect"]


def dense_run_single(v, ops):
    for op in ops:
        v = oracle.apply_gate(v, dense_matrix(op), op.qubits)
    return v
