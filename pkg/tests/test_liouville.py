from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from gqmesim.errors import DimensionError, ValidationError
from gqmesim.liouville import (
    basis_operator,
    devectorize,
    frobenius_norm,
    is_hermiticity_preserving,
    is_trace_preserving,
    liouvillian_of,
    operator_norm,
    population_indices,
    validate_density_matrix,
    vectorize,
)

from .helpers import random_density, random_hermitian

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
seeds = st.integers(0, 2**32 - 1)


def test_vectorize_row_major():
    rho = np.array([[1, 1], [1, 3]]) / 4
    assert np.array_equal(vectorize(rho), [0.25, 0.25, 0.25, 0.75])
    assert np.array_equal(vectorize(np.eye(2) / 2), [0.5, 0, 0, 0.5])
    assert np.array_equal(vectorize(np.diag([1.0, 0.0])), [1, 0, 0, 0])


def test_devectorize_examples():
    assert np.array_equal(devectorize([1, 0, 0, 0]), [[1, 0], [0, 0]])
    assert np.array_equal(devectorize([0.25, 0.25, 0.25, 0.75]), np.array([[1, 1], [1, 3]]) / 4)
    a, b, c, d = 1 + 2j, 3.0, -1j, 7.0
    assert np.array_equal(devectorize([a, b, c, d]), [[a, b], [c, d]])


def test_devectorize_rejects_non_square_length():
    with pytest.raises(DimensionError):
        devectorize(np.ones(5))


@given(seeds, st.integers(1, 5))
def test_vectorize_round_trip_is_exact(seed, n):
    rho = random_density(np.random.default_rng(seed), n)
    assert np.array_equal(devectorize(vectorize(rho)), rho)


def test_frobenius_examples():
    assert frobenius_norm(vectorize(np.array([[1, 1], [1, 3]]) / 4)) == pytest.approx(np.sqrt(3) / 2)
    assert frobenius_norm(vectorize(np.diag([1.0, 0.0]))) == pytest.approx(1.0)
    assert frobenius_norm(vectorize(np.eye(2))) == pytest.approx(np.sqrt(2))


@given(seeds, st.integers(1, 5))
def test_frobenius_matches_hilbert_schmidt(seed, n):
    rho = random_density(np.random.default_rng(seed), n)
    hs = np.sqrt(np.trace(rho.conj().T @ rho).real)
    assert frobenius_norm(vectorize(rho)) == pytest.approx(hs, rel=1e-12)


def test_operator_norm_examples():
    assert operator_norm(np.eye(4)) == pytest.approx(1.0)
    assert operator_norm(np.diag([0.5, 2.0, 1, 1])) == pytest.approx(2.0, rel=1e-10)


def test_operator_norm_rejects_nonfinite():
    with pytest.raises(ValidationError):
        operator_norm(np.array([[np.nan, 0], [0, 1]]))


@given(seeds)
def test_operator_norm_submultiplicative(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert operator_norm(a @ b) <= operator_norm(a) * operator_norm(b) * (1 + 1e-12)


def test_liouvillian_examples():
    assert np.allclose(liouvillian_of(SIGMA_Z), np.diag([0, 2, -2, 0]), atol=0)
    assert np.array_equal(liouvillian_of(np.zeros((2, 2))), np.zeros((4, 4)))


@given(seeds, st.floats(-3, 3), st.floats(-3, 3))
def test_liouvillian_matches_commutator(seed, eps, gam):
    rng = np.random.default_rng(seed)
    h = eps * SIGMA_Z + gam * SIGMA_X
    rho = random_density(rng, 2)
    lhs = devectorize(liouvillian_of(h) @ vectorize(rho))
    assert np.max(np.abs(lhs - (h @ rho - rho @ h))) <= 1e-12 * max(1.0, abs(eps) + abs(gam))


def test_liouvillian_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        liouvillian_of(np.array([[0, 1], [0, 0]]))


@given(seeds, st.integers(2, 4), st.floats(0, 5))
def test_unitary_superoperators_preserve_trace_and_hermiticity(seed, n, t):
    h = random_hermitian(np.random.default_rng(seed), n)
    prop = expm(-1j * liouvillian_of(h) * t)
    assert is_trace_preserving(prop)
    assert is_hermiticity_preserving(prop)


def test_flags_detect_violations():
    bad = np.eye(4, dtype=complex)
    bad[0, 0] = 1.1
    assert not is_trace_preserving(bad)
    skew = np.eye(4, dtype=complex)
    skew[1, 0] = 0.3j
    assert not is_hermiticity_preserving(skew)


def test_density_validation():
    validate_density_matrix(np.diag([0.3, 0.7]))
    with pytest.raises(ValidationError):
        validate_density_matrix(np.array([[0.5, 1j], [0.0, 0.5]]))
    with pytest.raises(ValidationError):
        validate_density_matrix(np.diag([0.3, 0.6]))
    with pytest.raises(ValidationError):
        validate_density_matrix(np.diag([1.5, -0.5]))


def test_basis_helpers():
    assert np.array_equal(vectorize(basis_operator(2, 1, 0)), [0, 0, 1, 0])
    assert population_indices(2) == [0, 3]
    assert population_indices(3) == [0, 4, 8]
