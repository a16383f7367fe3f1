import math

import numpy as np
import pytest

from conftest import random_pauli
from stabilizer_tn import gates, oracle
from stabilizer_tn.circuit import parse
from stabilizer_tn.engine import StabilizerTN, chi_experiment, chi_sample, new_state, run_circuit
from stabilizer_tn.exceptions import (
    CapacityError,
    ImpossibleOutcomeError,
    InvalidObservableError,
    InvalidSizeError,
)
from stabilizer_tn.mps import TruncationPolicy, basis_state
from stabilizer_tn.pauli import PauliString, identity_tableau, random_clifford

L = PauliString.from_label


def tensors(st):
    return [t.copy() for t in st.nu.tensors]


def same_tensors(a, b):
    return len(a) == len(b) and all(np.array_equal(x, y) for x, y in zip(a, b))


def random_start(n, seed):
    rng = np.random.default_rng(seed)
    st = StabilizerTN(random_clifford(n, rng), basis_state(n, np.zeros(n, int)), rng=rng)
    for _ in range(4):
        st.apply_rotation("XYZ"[rng.integers(3)], int(rng.integers(n)), float(rng.uniform(0, 6)))
        st.apply_clifford("cx", *rng.choice(n, 2, replace=False).tolist())
    return st


class TestNewState:
    def test_one_qubit(self):
        np.testing.assert_allclose(new_state(1).reconstruct_dense(), [1, 0])

    def test_z_expectations(self):
        st = new_state(4)
        assert all(st.expectation(PauliString.single(4, q, "Z")) == 1 for q in range(4))
        assert st.max_bond() == 1

    def test_seed_stream(self):
        a, b = new_state(2, seed=5), new_state(2, seed=5)
        assert a.rng.random() == b.rng.random()

    def test_two_qubits(self):
        np.testing.assert_allclose(new_state(2).reconstruct_dense(), [1, 0, 0, 0])


class TestClifford:
    def test_nu_untouched(self):
        st = random_start(5, 0)
        before = tensors(st)
        rng = np.random.default_rng(1)
        for _ in range(60):
            name = rng.choice(["h", "s", "sdg", "x", "y", "z", "cx", "cz", "swap"])
            qs = rng.choice(5, 2, replace=False).tolist()
            st.apply_clifford(name, *(qs if name in ("cx", "cz", "swap") else qs[:1]))
        assert same_tensors(before, tensors(st))

    def test_ghz(self):
        st = new_state(8).apply_clifford("h", 0)
        for q in range(7):
            st.apply_clifford("cx", q, q + 1)
        ghz = np.zeros(256)
        ghz[0] = ghz[-1] = 1 / np.sqrt(2)
        assert st.max_bond() == 1
        assert oracle.fidelity_up_to_phase(st.reconstruct_dense(), ghz) == pytest.approx(1)

    def test_hh(self):
        st = new_state(3).apply_clifford("h", 0).apply_clifford("h", 0)
        assert st.tableau == identity_tableau(3)

    def test_after_h(self):
        v = new_state(2).apply_clifford("h", 0).reconstruct_dense()
        # qubit 0 is the least significant index bit
        np.testing.assert_allclose(v, np.array([1, 1, 0, 0]) / np.sqrt(2), atol=1e-12)

    def test_not_clifford(self):
        with pytest.raises(ValueError):
            new_state(2).apply_clifford("t", 0)

    def test_bad_qubit(self):
        with pytest.raises(InvalidSizeError):
            new_state(2).apply_clifford("h", 3)


class TestRotation:
    def test_t_state_stays_product(self):
        st = new_state(10)
        for q in range(10):
            st.apply_clifford("h", q)
        for q in range(10):
            st.apply_rotation("Z", q, np.pi / 4)
            assert st.max_bond() == 1
        assert st.pseudo_stabilizer_rank() == 1024

    @pytest.mark.parametrize("seed", range(20))
    def test_single_t_bound(self, seed):
        rng = np.random.default_rng(seed)
        st = StabilizerTN(random_clifford(12, rng), basis_state(12, np.zeros(12, int)))
        st.apply_rotation("Z", int(rng.integers(12)), np.pi / 4)
        assert st.max_bond() <= 16

    def test_chi_bound_relative(self):
        for seed in range(10):
            st = random_start(8, seed)
            rng = np.random.default_rng(seed + 100)
            for _ in range(5):
                chi = st.max_bond()
                st.apply_rotation("XYZ"[rng.integers(3)], int(rng.integers(8)), float(rng.uniform(0, 6)))
                assert st.max_bond() <= 16 * chi

    def test_inverse(self):
        st = random_start(4, 3)
        v = st.reconstruct_dense()
        st.apply_rotation("X", 2, 0.77).apply_rotation("X", 2, -0.77)
        assert oracle.fidelity_up_to_phase(st.reconstruct_dense(), v) >= 1 - 1e-10

    @pytest.mark.parametrize("axis", "XYZ")
    @pytest.mark.parametrize("seed", range(5))
    def test_matches_dense(self, axis, seed):
        st = random_start(5, seed)
        q = seed % 5
        theta = 0.3 + seed
        v = oracle.apply_gate(st.reconstruct_dense(), gates.ROTATIONS[axis](theta), (q,))
        st.apply_rotation(axis, q, theta)
        assert oracle.fidelity_up_to_phase(st.reconstruct_dense(), v) >= 1 - 1e-10
        assert st.nu.norm() == pytest.approx(1, abs=1e-10)

    @pytest.mark.parametrize("axis", "XYZ")
    @pytest.mark.parametrize("k", range(-4, 5))
    def test_quarter_turn_snap(self, axis, k):
        st = random_start(3, k + 10)
        before = tensors(st)
        theta = k * np.pi / 2
        v = oracle.apply_gate(st.reconstruct_dense(), gates.ROTATIONS[axis](theta), (1,))
        st.apply_rotation(axis, 1, theta)
        assert same_tensors(before, tensors(st))
        assert oracle.fidelity_up_to_phase(st.reconstruct_dense(), v) >= 1 - 1e-12

    def test_snap_disabled(self):
        st = random_start(3, 1)
        st.snap_clifford = False
        v = oracle.apply_gate(st.reconstruct_dense(), gates.rz(np.pi / 2), (0,))
        st.apply_rotation("Z", 0, np.pi / 2)
        assert oracle.fidelity_up_to_phase(st.reconstruct_dense(), v) >= 1 - 1e-10

    def test_non_finite(self):
        with pytest.raises(ValueError):
            new_state(1).apply_rotation("Z", 0, math.inf)

    def test_bad_axis(self):
        with pytest.raises(ValueError):
            new_state(1).apply_rotation("W", 0, 0.1)


class TestExpectation:
    def test_fresh(self):
        st = new_state(2)
        assert st.expectation(L("ZI")) == 1
        assert st.expectation(L("XI")) == 0

    def test_matches_dense(self):
        rng = np.random.default_rng(8)
        for seed in range(10):
            st = random_start(6, seed)
            v = st.reconstruct_dense()
            for _ in range(10):
                p = random_pauli(6, rng)
                assert st.expectation(p) == pytest.approx(oracle.expectation(v, p).real, abs=1e-9)

    def test_anti_hermitian(self):
        with pytest.raises(InvalidObservableError):
            new_state(1).expectation(L("iZ"))

    def test_size_mismatch(self):
        with pytest.raises(InvalidSizeError):
            new_state(2).expectation(L("Z"))


class TestMeasure:
    def test_deterministic(self):
        st = new_state(2)
        before = tensors(st)
        _, rec = st.measure(L("ZI"))
        assert rec.outcome == 1 and rec.probability == 1
        assert same_tensors(before, tensors(st))
        assert st.tableau == identity_tableau(2)

    def test_x_forced_plus(self):
        st = new_state(1)
        _, rec = st.measure(L("X"), forced=1)
        assert rec.probability == pytest.approx(0.5)
        assert st.tableau.stabilizer(0) == L("X")
        assert st.tableau.destabilizer(0) == L("Z")
        np.testing.assert_allclose(st.nu.to_dense(), [1, 0], atol=1e-12)
        np.testing.assert_allclose(st.reconstruct_dense(), np.array([1, 1]) / np.sqrt(2), atol=1e-12)

    def test_minus_x_sign(self):
        st = new_state(1)
        st.measure(L("-X"), forced=1)
        assert st.tableau.r[1]
        assert st.tableau.stabilizer(0) == L("-X")

    def test_ghz_correlation(self):
        for seed in range(10):
            st = new_state(3, seed=seed).apply_clifford("h", 0).apply_clifford("cx", 0, 1).apply_clifford("cx", 1, 2)
            _, r0 = st.measure(L("ZII"))
            _, r1 = st.measure(L("IZI"))
            assert r0.outcome == r1.outcome
            assert st.tableau.is_valid()

    def test_impossible(self):
        with pytest.raises(ImpossibleOutcomeError):
            new_state(1).measure(L("Z"), forced=-1)

    def test_identity(self):
        with pytest.raises(InvalidObservableError):
            new_state(2).measure(L("II"))

    def test_bad_forced(self):
        with pytest.raises(ValueError):
            new_state(1).measure(L("X"), forced=0)

    def test_statistics(self):
        st0 = new_state(1, seed=2024)
        plus = 0
        for _ in range(10_000):
            st = StabilizerTN(st0.tableau.copy(), st0.nu.copy(), rng=st0.rng)
            plus += st.measure(L("X"))[1].outcome == 1
        assert abs(plus / 10_000 - 0.5) <= 3 * 0.5 / 100

    @pytest.mark.parametrize("seed", range(40))
    def test_general_pauli_matches_dense(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 6))
        st = random_start(n, seed)
        p = random_pauli(n, rng)
        if p.is_identity():
            return
        v = st.reconstruct_dense()
        xi_before = st.pseudo_stabilizer_rank()
        ev = oracle.expectation(v, p).real
        outcome = 1 if ev > -0.5 else -1
        dec = st.decompose(p)
        _, rec = st.measure(p, forced=outcome)
        assert rec.probability == pytest.approx((1 + outcome * ev) / 2, abs=1e-10)
        w, _, _ = oracle.measure_pauli(v, p, forced=outcome)
        assert oracle.fidelity_up_to_phase(st.reconstruct_dense(), w) >= 1 - 1e-9
        assert st.nu.norm() == pytest.approx(1, abs=1e-10)
        assert st.tableau.is_valid()
        if dec.dbits.any() and abs(ev) < 1 - 1e-10:
            assert st.pseudo_stabilizer_rank() <= xi_before

    def test_stabilizer_only_path_keeps_tableau(self):
        st = random_start(4, 7)
        p = st.tableau.stabilizer(1) * st.tableau.stabilizer(3)
        t = st.tableau.copy()
        v = st.reconstruct_dense()
        ev = oracle.expectation(v, p).real
        if abs(ev) > 1 - 1e-6:
            pytest.skip("deterministic draw")
        _, rec = st.measure(p, forced=1)
        assert st.tableau == t
        w, _, _ = oracle.measure_pauli(v, p, forced=1)
        assert oracle.fidelity_up_to_phase(st.reconstruct_dense(), w) >= 1 - 1e-9

    def test_copy_independent(self):
        st = random_start(3, 0)
        c = st.copy()
        c.apply_clifford("h", 0)
        assert not (c.tableau == st.tableau)
        assert c.rng.random() == st.rng.random()


class TestDiagnostics:
    def test_reconstruct_limit(self):
        with pytest.raises(CapacityError):
            new_state(13).reconstruct_dense()

    def test_pseudo_rank(self):
        assert new_state(3).pseudo_stabilizer_rank() == 1
        st = new_state(4).apply_clifford("h", 0).apply_clifford("cx", 0, 3)
        assert st.pseudo_stabilizer_rank() == 1

    def test_lossy_policy_renormalizes(self):
        rng = np.random.default_rng(3)
        st = StabilizerTN(random_clifford(10, rng), basis_state(10, np.zeros(10, int)), TruncationPolicy(chi_max=2))
        for q in range(10):
            st.apply_rotation("Z", q, np.pi / 4)
            assert st.max_bond() <= 2
            assert st.nu.norm() == pytest.approx(1, abs=1e-10)


class TestRunCircuit:
    def test_t_state(self):
        text = "qubits 12\n" + "".join(f"h {q}\n" for q in range(12)) + "".join(f"t {q}\n" for q in range(12))
        rep = run_circuit(parse(text), seed=0, pseudo_rank=True)
        assert rep.max_chi == 1
        assert rep.pseudo_rank == 4096

    def test_clifford_trace(self):
        rng = np.random.default_rng(0)
        lines = ["qubits 6"]
        for _ in range(100):
            if rng.random() < 0.5:
                lines.append(f"{rng.choice(['h', 's', 'sdg', 'x', 'y', 'z'])} {rng.integers(6)}")
            else:
                a, b = rng.choice(6, 2, replace=False)
                lines.append(f"{rng.choice(['cx', 'cz', 'swap'])} {a} {b}")
        rep = run_circuit(parse("\n".join(lines)), seed=1)
        assert rep.chi_trace == [1] * 100

    def test_measurement_records(self):
        c = parse("qubits 3\nh 0\nrx 0.4 1\ncx 0 2\nmeasure 0\nmeasure 1\nmeasure 2\nexpect ZIZ\n")
        rep = run_circuit(c, seed=4)
        assert len(rep.records) == 3
        for r in rep.records:
            assert 0 <= r.probability <= 1
            assert r.probability == pytest.approx((1 + r.outcome * r.expectation_before) / 2, abs=1e-12)
        assert rep.records[0].outcome == rep.records[2].outcome
        assert rep.expectations == [("ZIZ", pytest.approx(1))]

    def test_deterministic(self):
        c = parse("qubits 3\nh 0\nh 1\nt 1\ncx 1 2\nmeasure 2\nmeasure 0\nry pi/3 0\nmeasure 0\n")
        a, b = run_circuit(c, seed=9).to_json(), run_circuit(c, seed=9).to_json()
        a.pop("wall_time_ms"), b.pop("wall_time_ms")
        assert a == b

    def test_json_keys(self):
        rep = run_circuit(parse("qubits 1\nh 0\n"), seed=1, pseudo_rank=True).to_json()
        assert list(rep) == ["n", "seed", "records", "expectations", "chi_trace", "max_chi", "pseudo_rank", "wall_time_ms"]


class TestChiExperiment:
    def test_deterministic(self):
        a = chi_experiment(6, 10, seed=3)
        b = chi_experiment(6, 10, seed=3)
        assert a.samples == b.samples and a.qubits == b.qubits

    def test_bound(self):
        res = chi_experiment(8, 64, seed=0)
        assert len(res.samples) == 64
        assert res.max <= 4
        assert sum(res.histogram.values()) == 64

    def test_two_qubits_against_schmidt_rank(self):
        for i in range(20):
            q, s = chi_sample(2, 0, i, tp=TruncationPolicy(eps=0.0))
            rng = np.random.default_rng(np.random.SeedSequence([0, i]))
            t = random_clifford(2, rng)
            st = StabilizerTN(t, basis_state(2, [0, 0]))
            st.apply_rotation("Z", q, np.pi / 4)
            rank = oracle.schmidt_rank(st.nu.to_dense(), 1)
            assert s <= 2
            assert 2**s >= rank

    def test_fixed_qubit(self):
        res = chi_experiment(5, 8, seed=1, tgate_qubit=2)
        assert res.qubits == [2] * 8

    def test_fixed_qubit_out_of_range(self):
        with pytest.raises(InvalidSizeError):
            chi_experiment(4, 2, tgate_qubit=4)

    def test_parallel_same_order(self):
        a = chi_experiment(6, 6, seed=2)
        b = chi_experiment(6, 6, seed=2, workers=2)
        assert a.samples == b.samples

    def test_small_n(self):
        with pytest.raises(InvalidSizeError):
            chi_experiment(1, 3)
