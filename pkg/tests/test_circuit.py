from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import unitary_group

from gqmesim.circuit import (
    SX_MATRIX,
    Gate,
    GateSequence,
    cx_matrix,
    equal_up_to_phase,
    exact_populations,
    format_circuit,
    parse_circuit,
    read_histogram,
    reconstruct,
    retrieve_populations,
    run_statevector,
    rz_matrix,
    sample_shots,
    transpile,
    two_level_decompose,
    write_histogram,
)
from gqmesim.circuit.emulator import ShotHistogram
from gqmesim.circuit.transpile import (
    TwoLevel,
    compose_two_level,
    gray_path,
    synthesize_1q,
    transpile_two_level,
)
from gqmesim.dilation import dilate_step
from gqmesim.errors import DimensionError, SeriesFormatError, ValidationError
from gqmesim.fixtures import G3

seeds = st.integers(0, 2**32 - 1)


def _haar(n, seed):
    return unitary_group.rvs(2**n, random_state=seed)


# gates ---------------------------------------------------------------------


def test_gate_matrices():
    assert np.allclose(rz_matrix(np.pi), np.diag([-1j, 1j]))
    assert np.allclose(SX_MATRIX @ SX_MATRIX, [[0, 1], [1, 0]])
    seq = GateSequence(1, [Gate.sx(0), Gate.sx(0)])
    assert np.allclose(reconstruct(seq), [[0, 1], [1, 0]])
    seq = GateSequence(2, [Gate.rz(0, np.pi)])
    assert np.allclose(reconstruct(seq), np.kron(np.eye(2), rz_matrix(np.pi)))


def test_cx_convention():
    u = reconstruct(GateSequence(2, [Gate.cx(0, 1)]))
    assert np.array_equal(u, cx_matrix())
    e1 = np.zeros(4)
    e1[1] = 1
    out = run_statevector(GateSequence(2, [Gate.cx(0, 1)]), e1)
    assert np.argmax(np.abs(out)) == 3


def test_gate_validation():
    with pytest.raises(ValidationError):
        Gate("H", (0,))
    with pytest.raises(ValidationError):
        Gate.cx(1, 1)
    with pytest.raises(ValidationError):
        GateSequence(2, [Gate.rz(2, 0.1)])
    with pytest.raises(DimensionError):
        Gate.unitary(np.eye(2), [0, 1])


def test_unitary_gate_lifting():
    m = unitary_group.rvs(4, random_state=1)
    seq = GateSequence(3, [Gate.unitary(m, [0, 2])])
    full = reconstruct(seq)
    # qubit 0 is bit 0, qubit 2 is bit 2; local index bit i <-> qubits[i]
    ref = np.zeros((8, 8), dtype=complex)
    for i in range(8):
        for j in range(8):
            if (i >> 1) & 1 == (j >> 1) & 1:
                li = (i & 1) | (((i >> 2) & 1) << 1)
                lj = (j & 1) | (((j >> 2) & 1) << 1)
                ref[i, j] = m[li, lj]
    assert np.allclose(full, ref)


def test_circuit_text_round_trip():
    seq = transpile(_haar(2, 5))
    back = parse_circuit(format_circuit(seq))
    assert back.gates == seq.gates and back.global_phase == seq.global_phase
    assert format_circuit(seq).startswith("QCIRC v1 nq=2 phase=")


@pytest.mark.parametrize(
    "text,match",
    [
        ("", "empty"),
        ("QCIRC v2 nq=1 phase=1 0\n", "header"),
        ("QCIRC v1 nq=x phase=1 0\n", "header"),
        ("QCIRC v1 nq=1 phase=1 0\nRZ q0\n", "record 2"),
        ("QCIRC v1 nq=1 phase=1 0\nSX q0\nH q0\n", "record 3"),
        ("QCIRC v1 nq=1 phase=1 0\nCX q0 q1\n", "record 2"),
        ("QCIRC v1 nq=1 phase=1 0\nRZ qq 0.5\n", "record 2"),
    ],
)
def test_circuit_parse_errors(text, match):
    with pytest.raises(SeriesFormatError, match=match):
        parse_circuit(text)


# transpiler ------------------------------------------------------------------


def test_identity_transpiles_to_nothing():
    seq = transpile(np.eye(8))
    assert len(seq) == 0
    assert np.allclose(reconstruct(seq), np.eye(8))
    phased = transpile(np.exp(0.3j) * np.eye(4))
    assert len(phased) == 0 and phased.global_phase == pytest.approx(np.exp(0.3j))


def test_cx_is_fixed_point():
    seq = transpile(cx_matrix())
    assert np.max(np.abs(reconstruct(seq) - cx_matrix())) <= 1e-10


@given(seeds, st.integers(1, 4))
def test_transpile_reconstructs(seed, n):
    u = _haar(n, seed % 2**31)
    seq = transpile(u)
    assert np.max(np.abs(reconstruct(seq) - u)) <= 1e-10
    assert {g.kind for g in seq.gates} <= {"RZ", "SX", "CX"}


@given(seeds)
def test_reconstruct_transpile_idempotent(seed):
    rng = np.random.default_rng(seed)
    gates = []
    for _ in range(25):
        k = rng.integers(3)
        if k == 0:
            gates.append(Gate.rz(int(rng.integers(3)), float(rng.uniform(-4, 4))))
        elif k == 1:
            gates.append(Gate.sx(int(rng.integers(3))))
        else:
            c, t = rng.choice(3, size=2, replace=False)
            gates.append(Gate.cx(int(c), int(t)))
    u = reconstruct(GateSequence(3, gates))
    again = reconstruct(transpile(u))
    assert equal_up_to_phase(again, u) <= 1e-10


def test_transpile_rejects_bad_input():
    with pytest.raises(ValidationError, match="not unitary"):
        transpile(np.diag([1.0, 0.5]))
    with pytest.raises(DimensionError):
        transpile(np.eye(3))
    with pytest.raises(DimensionError):
        transpile(np.ones((2, 4)))


@given(seeds, st.integers(1, 4))
def test_two_level_decomposition(seed, n):
    u = _haar(n, seed % 2**31)
    ops = two_level_decompose(u)
    assert np.max(np.abs(compose_two_level(ops, 2**n) @ u - np.eye(2**n))) <= 1e-12
    for op in ops:
        if isinstance(op, TwoLevel):
            assert bin(op.lo ^ op.hi).count("1") == 1


def test_gray_path():
    assert gray_path(0, 7) == [0, 1, 3, 7]
    assert gray_path(5, 2) == [5, 4, 6, 2]
    for s, t in ((3, 12), (6, 9)):
        p = gray_path(s, t)
        assert p[0] == s and p[-1] == t
        assert all(bin(a ^ b).count("1") == 1 for a, b in zip(p, p[1:]))


@given(seeds, st.integers(0, 7), st.integers(0, 7))
def test_routed_two_level(seed, s, t):
    if s == t:
        return
    lo, hi = min(s, t), max(s, t)
    op = TwoLevel(lo, hi, unitary_group.rvs(2, random_state=seed % 2**31))
    seq = transpile_two_level(op, 3)
    assert np.max(np.abs(reconstruct(seq) - op.embed(8))) <= 1e-10


@given(seeds)
def test_single_qubit_resynthesis(seed):
    m = unitary_group.rvs(2, random_state=seed % 2**31)
    gates, phase = synthesize_1q(m, 0)
    assert len(gates) <= 5
    assert np.allclose(phase * reconstruct(GateSequence(1, gates)), m, atol=1e-12)
    kinds = [g.kind for g in gates]
    assert kinds.count("SX") in (0, 2)


def test_diagonal_single_qubit_needs_one_rz():
    gates, phase = synthesize_1q(np.diag([np.exp(0.2j), np.exp(-0.9j)]), 0)
    assert [g.kind for g in gates] == ["RZ"]


def test_g3_dilation_counts():
    u = dilate_step(G3).matrix
    seq = transpile(u)
    assert np.max(np.abs(reconstruct(seq) - u)) <= 1e-10
    c = seq.counts()
    assert c["CX"] <= 4 * 41 and c["SX"] <= 4 * 98 and c["RZ"] <= 4 * 153


def test_gate_count_growth():
    totals = []
    for n in (3, 4, 5):
        seq = transpile(_haar(n, 11))
        totals.append(sum(seq.counts().values()))
    assert totals[0] < totals[1] < totals[2]
    # between 2^n and 4^n scaling per added qubit
    assert all(2 < b / a < 16 for a, b in zip(totals, totals[1:]))


# emulator --------------------------------------------------------------------


@given(seeds, st.integers(1, 4))
def test_statevector_matches_dense(seed, n):
    rng = np.random.default_rng(seed)
    u = _haar(n, seed % 2**31)
    x = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    x /= np.linalg.norm(x)
    seq = transpile(u)
    out = run_statevector(seq, x)
    assert np.max(np.abs(out - u @ x)) <= 1e-10
    assert abs(np.linalg.norm(out) - 1) <= 1e-12
    y = rng.normal(size=2**n) + 0j
    y /= np.linalg.norm(y)
    z = (x + 2 * y) / np.linalg.norm(x + 2 * y)
    combo = run_statevector(seq, z)
    assert np.allclose(combo * np.linalg.norm(x + 2 * y), out + 2 * run_statevector(seq, y), atol=1e-10)


def test_statevector_examples():
    u = _haar(3, 2)
    e0 = np.eye(8)[0]
    assert np.allclose(run_statevector(u, e0), u[:, 0])
    with pytest.raises(DimensionError):
        run_statevector(u, np.ones(4) / 2)
    with pytest.raises(ValidationError):
        run_statevector(u, np.ones(8))


def test_g3_emulation_matches_classical():
    dil = dilate_step(G3)
    amps = run_statevector(transpile(dil.matrix), np.eye(8)[0])
    col = G3[:, 0] / dil.n_c
    assert abs(amps[0]) ** 2 == pytest.approx(abs(col[0]) ** 2, abs=1e-12)
    assert abs(amps[3]) ** 2 == pytest.approx(abs(col[3]) ** 2, abs=1e-12)


def test_sampling_examples():
    e3 = np.eye(8)[3]
    assert sample_shots(e3, 2000, 1).counts == {3: 2000}
    uniform = np.full(8, 1 / np.sqrt(8))
    hist = sample_shots(uniform, 2000, 7)
    sigma = np.sqrt(2000 * 1 / 8 * 7 / 8)
    assert all(abs(hist.counts.get(i, 0) - 250) <= 4 * sigma for i in range(8))
    assert sample_shots(uniform, 2000, 7) == hist
    with pytest.raises(ValidationError):
        sample_shots(uniform, 0, 1)
    with pytest.raises(ValidationError):
        sample_shots(2 * uniform, 10, 1)


def test_histogram_invariant_and_csv(tmp_path):
    with pytest.raises(ValidationError):
        ShotHistogram(10, {0: 3})
    hist = sample_shots(np.full(4, 0.5), 100, 3)
    write_histogram(hist, tmp_path / "h.csv")
    assert (tmp_path / "h.csv").read_text().splitlines()[0] == "basis_index,count"
    assert read_histogram(tmp_path / "h.csv").counts == hist.counts


def test_retrieval_examples():
    hist = ShotHistogram(4, {0: 1, 1: 3})
    pops = retrieve_populations(hist, n_c=2.0, sigma0_fnorm=1.0)
    assert pops.diagonal[0] == pytest.approx(1.0)
    assert pops.diagonal[1] == 0.0
    start = retrieve_populations(ShotHistogram(2000, {0: 2000}), 1.0)
    assert start.diagonal[0] == 1.0 and start.sigma_z == 1.0
    amps = np.zeros(8, dtype=complex)
    amps[0], amps[3] = 0.6, 0.8
    assert exact_populations(amps, 1.5).sigma_z == pytest.approx(1.5 * (0.6 - 0.8))
