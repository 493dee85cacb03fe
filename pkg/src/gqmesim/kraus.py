"""Kraus channels run through lifted operators and 2-dilation circuits.

Row-major flattening turns ``M rho M^+`` into ``(M (x) I)(I (x) conj(M)) v``;
the two factors are dilated separately and their 2-dilations multiplied, so
the top-left block of the product is the lifted Kraus branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit.emulator import run_statevector, sample_shots
from .dilation import dilate_2, embed_pow2
from .errors import ValidationError
from .liouville import frobenius_norm, population_indices, validate_density_matrix, vectorize

COMPLETENESS_TOL = 1e-10


@dataclass(frozen=True)
class KrausSet:
    operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(m, dtype=complex) for m in self.operators)
        if not ops:
            raise ValidationError("a Kraus set needs at least one operator")
        n = ops[0].shape[0]
        total = sum(m.conj().T @ m for m in ops)
        err = np.max(np.abs(total - np.eye(n)))
        if err > COMPLETENESS_TOL:
            raise ValidationError(f"Kraus operators are not complete (deviation {err:.2e})")
        object.__setattr__(self, "operators", ops)

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(m @ rho @ m.conj().T for m in self.operators)


def amplitude_damping_kraus(gamma: float, t: float) -> KrausSet:
    """M0 = diag(1, e^{-gamma t/2}), M1 = sqrt(1 - e^{-gamma t}) |0><1|."""
    if t < 0:
        raise ValidationError(f"time must be nonnegative, got {t}")
    if gamma < 0:
        raise ValidationError(f"decay rate must be nonnegative, got {gamma}")
    decay = math.exp(-gamma * t)
    m0 = np.diag([1.0, math.sqrt(decay)]).astype(complex)
    m1 = np.array([[0.0, math.sqrt(-math.expm1(-gamma * t))], [0.0, 0.0]], dtype=complex)
    return KrausSet((m0, m1))


def lift_kraus(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(M (x) I, I (x) conj(M)) acting on row-major flattened density matrices."""
    m = np.asarray(m, dtype=complex)
    eye = np.eye(m.shape[0])
    return np.kron(m, eye), np.kron(eye, m.conj())


def branch_unitary(m: np.ndarray) -> np.ndarray:
    """Padded product of the two 2-dilations for one Kraus operator."""
    m_tilde, n_tilde = lift_kraus(m)
    u_m = embed_pow2(dilate_2(m_tilde)).matrix
    u_n = embed_pow2(dilate_2(n_tilde)).matrix
    return u_n @ u_m


def evolve_kraus_circuit(
    rho0: np.ndarray,
    gamma: float,
    t: float,
    shots: int | None = None,
    seed: int | None = None,
) -> tuple[float, float]:
    """(rho00, rho11) at time t from the per-branch dilated circuits.

    With ``shots=None`` the populations are read from the output amplitudes.
    Otherwise each branch is measured ``shots`` times and the population is
    ``sqrt(P) * |v|_F``; branch k uses the seed stream ``(seed, k)``.
    """
    rho0 = validate_density_matrix(rho0)
    n = rho0.shape[0]
    if n != 2:
        raise ValidationError("amplitude damping acts on a 2x2 density matrix")
    v = vectorize(rho0)
    fnorm = frobenius_norm(v)
    idx = population_indices(n)
    kraus = amplitude_damping_kraus(gamma, t)
    pops = np.zeros(n)
    for k, m in enumerate(kraus):
        u = branch_unitary(m)
        state = np.zeros(u.shape[0], dtype=complex)
        state[: v.size] = v / fnorm
        out = run_statevector(u, state)
        if shots is None:
            pops += out[idx].real * fnorm
        else:
            child = None if seed is None else np.random.SeedSequence([seed, k])
            hist = sample_shots(out, shots, child)
            pops += np.sqrt([hist.probability(i) for i in idx]) * fnorm
    return float(pops[0]), float(pops[-1])
