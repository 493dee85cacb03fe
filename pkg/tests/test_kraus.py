from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gqmesim.errors import ValidationError
from gqmesim.kraus import KrausSet, amplitude_damping_kraus, branch_unitary, evolve_kraus_circuit, lift_kraus
from gqmesim.liouville import devectorize, operator_norm, vectorize

from .helpers import random_contraction, random_density

GAMMA = 1.52e9
RHO0 = np.array([[1, 1], [1, 3]], dtype=complex) / 4


def test_kraus_examples():
    m0, m1 = amplitude_damping_kraus(GAMMA, 0.0)
    assert np.array_equal(m0, np.eye(2)) and np.array_equal(m1, np.zeros((2, 2)))
    m0, m1 = amplitude_damping_kraus(1.0, 1e4)
    assert np.allclose(m0, np.diag([1, 0])) and np.allclose(m1, [[0, 1], [0, 0]])
    ks = amplitude_damping_kraus(GAMMA, 500e-12)
    total = sum(m.conj().T @ m for m in ks)
    assert np.max(np.abs(total - np.eye(2))) <= 1e-10
    with pytest.raises(ValidationError):
        amplitude_damping_kraus(GAMMA, -1e-12)
    with pytest.raises(ValidationError):
        KrausSet((np.eye(2), np.eye(2)))


def test_lift_examples():
    m_t, n_t = lift_kraus(np.eye(2))
    assert np.array_equal(m_t, np.eye(4)) and np.array_equal(n_t, np.eye(4))
    m0 = amplitude_damping_kraus(np.log(4.0), 1.0).operators[0]
    m_t, n_t = lift_kraus(m0)
    assert np.allclose(m_t, np.diag([1, 1, 0.5, 0.5]))
    assert np.allclose(n_t, np.diag([1, 0.5, 1, 0.5]))


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_lift_reproduces_conjugation(seed, n):
    rng = np.random.default_rng(seed)
    m = random_contraction(rng, n)
    rho = random_density(rng, n)
    m_t, n_t = lift_kraus(m)
    out = devectorize(n_t @ m_t @ vectorize(rho))
    assert np.max(np.abs(out - m @ rho @ m.conj().T)) <= 1e-12
    assert operator_norm(m_t) <= 1 + 1e-12 and operator_norm(n_t) <= 1 + 1e-12


def test_branch_unitary_shape():
    u = branch_unitary(amplitude_damping_kraus(GAMMA, 3e-10).operators[1])
    assert u.shape == (16, 16)
    assert np.allclose(u.conj().T @ u, np.eye(16), atol=1e-12)


def test_initial_populations():
    r00, r11 = evolve_kraus_circuit(RHO0, GAMMA, 0.0)
    assert (r00, r11) == pytest.approx((0.25, 0.75), abs=1e-12)


def test_exact_decay_curve():
    for k in range(0, 101, 5):
        t = k * 10e-12
        r00, r11 = evolve_kraus_circuit(RHO0, GAMMA, t)
        assert abs(r11 - 0.75 * np.exp(-GAMMA * t)) <= 1e-10
        assert abs(r00 + r11 - 1) <= 1e-10
    assert evolve_kraus_circuit(RHO0, GAMMA, 500e-12)[1] == pytest.approx(0.3508, abs=1e-4)


def test_readout_components_real_and_nonnegative():
    v = vectorize(RHO0)
    fn = np.linalg.norm(v)
    for m in amplitude_damping_kraus(GAMMA, 4e-10):
        out = branch_unitary(m) @ np.concatenate([v / fn, np.zeros(12)])
        for i in (0, 3):
            assert abs(out[i].imag) <= 1e-12 and out[i].real >= -1e-12


def test_shot_mode_is_seeded():
    a = evolve_kraus_circuit(RHO0, GAMMA, 2e-10, shots=2000, seed=5)
    b = evolve_kraus_circuit(RHO0, GAMMA, 2e-10, shots=2000, seed=5)
    assert a == b


def test_rejects_bad_state():
    with pytest.raises(ValidationError):
        evolve_kraus_circuit(np.eye(2), GAMMA, 0.0)
    with pytest.raises(ValidationError):
        evolve_kraus_circuit(np.eye(3) / 3, GAMMA, 0.0)
