"""Contraction normalization, defect operators and unitary dilations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .liouville import operator_norm

CONTRACTION_TOL = 1e-10


@dataclass(frozen=True)
class ContractionResult:
    g_prime: np.ndarray
    n_c: float


@dataclass(frozen=True)
class DilatedUnitary:
    matrix: np.ndarray
    n_c: float = 1.0
    block: int = 0  # size of the embedded contraction (top-left block)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def contraction_normalize(g: np.ndarray, n_c: float | None = None) -> ContractionResult:
    """Scale ``g`` into a contraction with ``n_c = max(1, ||g||_O)``.

    Passing ``n_c`` explicitly (e.g. a trajectory-wide value) skips the norm
    computation; it must still be large enough to make ``g/n_c`` a contraction.
    """
    g = np.asarray(g, dtype=complex)
    norm = operator_norm(g)
    if n_c is None:
        n_c = max(1.0, norm)
    elif norm / n_c > 1 + CONTRACTION_TOL:
        raise ValidationError(f"n_c={n_c:.6g} is below the operator norm {norm:.6g}")
    return ContractionResult(g_prime=g / n_c, n_c=float(n_c))


def defect_pair(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(D_A, D_{A^+}) from one SVD A = U S V^+.

    D_A = V sqrt(1 - S^2) V^+ and D_{A^+} = U sqrt(1 - S^2) U^+ share their
    factors, so A^+ D_{A^+} = D_A A^+ holds to rounding even when a singular
    value sits at 1.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError("defect needs a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValidationError("operator has non-finite entries")
    u, s, vh = np.linalg.svd(a)
    if s.size and s[0] > 1 + CONTRACTION_TOL:
        raise ValidationError(f"operator norm {s[0]:.12g} exceeds 1; not a contraction")
    gap = (1.0 - s) * (1.0 + s)
    # s may exceed 1 by rounding; those directions have no defect
    root = np.sqrt(np.clip(gap, 0.0, None))
    v = vh.conj().T
    return (v * root) @ vh, (u * root) @ u.conj().T


def defect(a: np.ndarray) -> np.ndarray:
    """D_A = sqrt(I - A^+ A) as a Hermitian PSD matrix."""
    return defect_pair(a)[0]


def dilate_1(g_prime: np.ndarray, n_c: float = 1.0) -> DilatedUnitary:
    """[[A, D_{A^+}], [D_A, -A^+]]: acting on (v, 0) gives (A v, D_A v)."""
    a = np.asarray(g_prime, dtype=complex)
    d_a, d_ah = defect_pair(a)
    u = np.block([[a, d_ah], [d_a, -a.conj().T]])
    return DilatedUnitary(matrix=u, n_c=n_c, block=a.shape[0])


def dilate_2(a: np.ndarray) -> DilatedUnitary:
    """Three-block dilation [[A, 0, D_{A^+}], [D_A, 0, -A^+], [0, I, 0]].

    The middle block column is empty on input vectors of the form (v, 0, 0),
    so the top-left block of ``dilate_2(B) @ dilate_2(A)`` is exactly ``B A``.
    """
    a = np.asarray(a, dtype=complex)
    d_a, d_ah = defect_pair(a)
    n = a.shape[0]
    z = np.zeros((n, n), dtype=complex)
    eye = np.eye(n, dtype=complex)
    u = np.block([[a, z, d_ah], [d_a, z, -a.conj().T], [z, eye, z]])
    return DilatedUnitary(matrix=u, block=n)


def next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def embed_pow2(u: DilatedUnitary | np.ndarray) -> DilatedUnitary:
    """Pad to the next power-of-two dimension with an identity block."""
    if isinstance(u, DilatedUnitary):
        mat, n_c, block = u.matrix, u.n_c, u.block
    else:
        mat, n_c, block = np.asarray(u, dtype=complex), 1.0, 0
    d = mat.shape[0]
    target = next_pow2(d)
    if target == d:
        return DilatedUnitary(matrix=mat, n_c=n_c, block=block)
    out = np.eye(target, dtype=complex)
    out[:d, :d] = mat
    return DilatedUnitary(matrix=out, n_c=n_c, block=block)


def unitarity_error(u: np.ndarray) -> float:
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def dilate_step(g: np.ndarray, n_c: float | None = None) -> DilatedUnitary:
    """Normalize one propagator step, 1-dilate it and pad to a qubit register."""
    res = contraction_normalize(g, n_c)
    return embed_pow2(dilate_1(res.g_prime, res.n_c))
