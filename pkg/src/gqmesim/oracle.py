"""Exact reduced dynamics and projection-free inputs by full diagonalization.

The system (x) bath Hamiltonian is diagonalized once, ``H = W diag(lam) W^+``.
In the eigenbasis every quantity needed here is a sum of oscillating terms

    Q(tau)_{ij,kl} = sum_ab M_{ab} exp(-i lam_a tau) exp(+i lam_b tau)

with a time-independent coefficient matrix ``M`` per superoperator entry, so
the full time grid costs one batched matrix product per chunk of times.
"""

from __future__ import annotations

import logging

import numpy as np

from .errors import ConvergenceError
from .series import PfiSeries, PropagatorSeries
from .spinboson import (
    BathModes,
    SpinBosonParams,
    TruncatedBathSpace,
    full_hamiltonian,
    thermal_bath_state,
)

log = logging.getLogger(__name__)

# bytes budget for one (P*D, chunk) intermediate
_CHUNK_BYTES = 64 * 2**20


class ExactOracle:
    """Cached eigendecomposition of one truncated spin-boson problem."""

    def __init__(
        self, params: SpinBosonParams, modes: BathModes, space: TruncatedBathSpace
    ):
        self.params = params
        self.modes = modes
        self.space = space
        h = full_hamiltonian(params, modes, space)
        self.rho_bath = thermal_bath_state(params, modes, space)
        self.ne = 2
        self.nb = self.rho_bath.shape[0]
        lam, w = np.linalg.eigh(h)
        self.energies = lam - lam.mean()
        self.vectors = w
        self._omega = self.energies[:, None] - self.energies[None, :]
        self._trace_maps = self._partial_trace_maps()
        self._initial = self._initial_operators()

    def _partial_trace_maps(self) -> list[np.ndarray]:
        # T^{ij}_{ab} = sum_n W[(i,n),a] conj(W[(j,n),b])
        ne, nb = self.ne, self.nb
        blocks = [self.vectors[i * nb : (i + 1) * nb, :] for i in range(ne)]
        return [blocks[i].T @ blocks[j].conj() for i in range(ne) for j in range(ne)]

    def _initial_operators(self) -> list[np.ndarray]:
        # |k><l| (x) rho_n in the eigenbasis
        ne = self.ne
        w = self.vectors
        out = []
        for k in range(ne):
            for l in range(ne):
                e = np.zeros((ne, ne), dtype=complex)
                e[k, l] = 1.0
                out.append(w.conj().T @ np.kron(e, self.rho_bath) @ w)
        return out

    def _coefficients(self, weight: np.ndarray | None) -> np.ndarray:
        """Stack of M matrices, index p = row * ne^2 + col."""
        d = self.vectors.shape[0]
        n2 = self.ne**2
        coeffs = np.empty((n2 * n2, d, d), dtype=complex)
        for row, tmap in enumerate(self._trace_maps):
            for col, x0 in enumerate(self._initial):
                m = tmap * x0
                coeffs[row * n2 + col] = m if weight is None else m * weight
        return coeffs

    def _evaluate(self, coeffs: np.ndarray, times: np.ndarray) -> np.ndarray:
        p, d, _ = coeffs.shape
        flat = coeffs.reshape(p * d, d)
        out = np.empty((times.size, p), dtype=complex)
        chunk = max(1, _CHUNK_BYTES // (16 * p * d))
        for start in range(0, times.size, chunk):
            tau = times[start : start + chunk]
            right = np.exp(1j * np.outer(self.energies, tau))  # (d, T)
            left = right.conj()
            mv = (flat @ right).reshape(p, d, tau.size)
            out[start : start + chunk] = np.einsum("at,pat->tp", left, mv)
        n2 = self.ne**2
        return out.reshape(times.size, n2, n2)

    def propagator(self, steps: int, dt: float | None = None) -> PropagatorSeries:
        dt = self.params.dt if dt is None else dt
        times = dt * np.arange(steps)
        g = self._evaluate(self._coefficients(None), times)
        return PropagatorSeries(dt, g)

    def pfis(self, steps: int, dt: float | None = None) -> PfiSeries:
        dt = self.params.dt if dt is None else dt
        times = dt * np.arange(steps)
        f = self._evaluate(self._coefficients(self._omega), times)
        fdot = self._evaluate(self._coefficients(-1j * self._omega**2), times)
        return PfiSeries(dt, f, fdot)


def _with_convergence_check(fn, params, modes, space, steps, tol):
    result = fn(ExactOracle(params, modes, space), steps)
    if tol is None:
        return result
    bigger = TruncatedBathSpace(space.fock_dim + 2, space.cap)
    ref = fn(ExactOracle(params, modes, bigger), steps)
    a = result.F if isinstance(result, PfiSeries) else result.matrices
    b = ref.F if isinstance(ref, PfiSeries) else ref.matrices
    change = float(np.max(np.abs(a - b)))
    log.debug("fock_dim %d -> %d changes result by %.3e", space.fock_dim, bigger.fock_dim, change)
    if change > tol:
        raise ConvergenceError(
            f"result changes by {change:.3e} > {tol:g} when fock_dim goes "
            f"{space.fock_dim} -> {bigger.fock_dim}"
        )
    return result


def exact_reduced_propagator(
    params: SpinBosonParams,
    modes: BathModes,
    space: TruncatedBathSpace,
    steps: int,
    convergence_tol: float | None = None,
) -> PropagatorSeries:
    """G(n dt) from Tr_n{exp(-iHt) (sigma (x) rho_n) exp(iHt)} for each basis sigma.

    With ``convergence_tol`` set, the calculation is repeated at
    ``fock_dim + 2`` and :class:`ConvergenceError` is raised if any entry
    moves by more than the tolerance.
    """
    return _with_convergence_check(
        lambda o, s: o.propagator(s), params, modes, space, steps, convergence_tol
    )


def compute_pfis(
    params: SpinBosonParams,
    modes: BathModes,
    space: TruncatedBathSpace,
    steps: int,
    convergence_tol: float | None = None,
) -> PfiSeries:
    """F(tau) = Tr_n{L exp(-iL tau) rho_n} and Fdot = -i Tr_n{L exp(-iL tau) L rho_n}.

    Fdot is evaluated from its own closed form, not by differentiating F.
    """
    return _with_convergence_check(
        lambda o, s: o.pfis(s), params, modes, space, steps, convergence_tol
    )
