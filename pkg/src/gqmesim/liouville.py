"""Liouville-space conventions and the two norms used throughout.

Density matrices are flattened row-major: ``(s11, ..., s1N, s21, ..., sNN)``.
A superoperator is then an ``N^2 x N^2`` matrix acting on that vector, and
the commutator ``[H, rho]`` becomes ``H (x) I - I (x) H^T``.

All quantities use hbar = 1.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError, ValidationError

HERMITIAN_TOL = 1e-12
SUPEROP_TOL = 1e-10


def _square(a: np.ndarray, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{what} must be square, got shape {a.shape}")
    return a


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Row-major flattening of a square matrix into a Liouville vector."""
    rho = _square(rho, "density matrix")
    return rho.reshape(-1).copy()


def devectorize(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    n = math.isqrt(v.size)
    if n * n != v.size:
        raise DimensionError(f"length {v.size} is not a perfect square")
    return v.reshape(n, n).copy()


def frobenius_norm(v: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(np.asarray(v)) ** 2)))


def operator_norm(a: np.ndarray) -> float:
    """Spectral norm (largest singular value) from a full SVD."""
    a = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise ValidationError("operator has non-finite entries")
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    h = np.asarray(h)
    return bool(np.max(np.abs(h - h.conj().T), initial=0.0) <= tol)


def liouvillian_of(h: np.ndarray) -> np.ndarray:
    """Superoperator of ``rho -> H rho - rho H`` under row-major flattening."""
    h = _square(h, "Hamiltonian")
    if not is_hermitian(h):
        raise ValidationError("Hamiltonian is not Hermitian")
    eye = np.eye(h.shape[0], dtype=complex)
    return np.kron(h, eye) - np.kron(eye, h.T)


def superop_dim(s: np.ndarray) -> int:
    """Hilbert-space dimension N of an N^2 x N^2 superoperator."""
    s = _square(s, "superoperator")
    n = math.isqrt(s.shape[0])
    if n * n != s.shape[0]:
        raise DimensionError(f"superoperator size {s.shape[0]} is not N^2")
    return n


def is_trace_preserving(s: np.ndarray, tol: float = SUPEROP_TOL) -> bool:
    """Check sum_j S[(j,j),(k,l)] == delta_kl for every column."""
    n = superop_dim(s)
    diag_rows = [j * n + j for j in range(n)]
    col_sums = np.asarray(s)[diag_rows, :].sum(axis=0)
    target = vectorize(np.eye(n))
    return bool(np.max(np.abs(col_sums - target)) <= tol)


def is_hermiticity_preserving(s: np.ndarray, tol: float = SUPEROP_TOL) -> bool:
    """Check S[(i,j),(k,l)] == conj(S[(j,i),(l,k)]) for all index pairs."""
    n = superop_dim(s)
    t = np.asarray(s).reshape(n, n, n, n)
    swapped = t.transpose(1, 0, 3, 2).conj()
    return bool(np.max(np.abs(t - swapped)) <= tol)


def validate_density_matrix(
    rho: np.ndarray, normalized: bool = True, psd_tol: float = -1e-10
) -> np.ndarray:
    """Return ``rho`` as a complex array after checking the physical invariants."""
    rho = _square(rho, "density matrix")
    if not is_hermitian(rho):
        raise ValidationError("density matrix is not Hermitian")
    if normalized and abs(np.trace(rho) - 1.0) > HERMITIAN_TOL:
        raise ValidationError(f"trace {np.trace(rho).real:.3e} != 1")
    if np.linalg.eigvalsh(rho).min() < psd_tol:
        raise ValidationError("density matrix is not positive semidefinite")
    return rho


def basis_operator(n: int, k: int, l: int) -> np.ndarray:
    """The matrix unit |k><l| of size n."""
    e = np.zeros((n, n), dtype=complex)
    e[k, l] = 1.0
    return e


def population_indices(n: int) -> list[int]:
    """Liouville indices of the diagonal entries sigma_jj."""
    return [j * n + j for j in range(n)]
