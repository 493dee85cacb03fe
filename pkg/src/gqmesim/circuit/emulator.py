"""Statevector execution, shot sampling and population readout."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DimensionError, SeriesFormatError, ValidationError
from .gates import CX, UNITARY, Gate, GateSequence, apply_gate

NORM_TOL = 1e-10


@dataclass(frozen=True)
class ShotHistogram:
    shots: int
    counts: dict[int, int] = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValidationError("histogram counts do not add up to the shot total")

    def probability(self, index: int) -> float:
        return self.counts.get(index, 0) / self.shots


@dataclass(frozen=True)
class Populations:
    diagonal: np.ndarray  # sigma_jj, j = 0..ne-1

    @property
    def sigma_z(self) -> float:
        return float(self.diagonal[0] - self.diagonal[-1])


def _check_state(state: np.ndarray, dim: int) -> np.ndarray:
    state = np.asarray(state, dtype=complex).reshape(-1)
    if state.size != dim:
        raise DimensionError(f"input state has length {state.size}, expected {dim}")
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValidationError(f"input state norm is {norm:.12g}, expected 1")
    return state


def _apply_flat(psi: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """One gate on a flat state vector (qubit q is bit q of the index)."""
    if gate.kind == CX:
        c, t = gate.qubits
        idx = np.arange(psi.size)
        return psi[np.where((idx >> c) & 1, idx ^ (1 << t), idx)]
    q = gate.qubits[0]
    m = gate.local_matrix()
    v = psi.reshape(-1, 2, 1 << q)
    out = np.empty_like(v)
    out[:, 0] = m[0, 0] * v[:, 0] + m[0, 1] * v[:, 1]
    out[:, 1] = m[1, 0] * v[:, 0] + m[1, 1] * v[:, 1]
    return out.reshape(-1)


def run_statevector(circuit: GateSequence | np.ndarray, state: np.ndarray) -> np.ndarray:
    """Noiseless output amplitudes of ``circuit`` (gates or a dense unitary) on ``state``."""
    if isinstance(circuit, GateSequence):
        n = circuit.n_qubits
        psi = _check_state(state, 2**n)
        for g in circuit.gates:
            if g.kind == UNITARY:
                psi = apply_gate(psi.reshape((2,) * n), g, n).reshape(-1)
            else:
                psi = _apply_flat(psi, g, n)
        return circuit.global_phase * psi
    u = np.asarray(circuit, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionError(f"unitary must be square, got {u.shape}")
    return u @ _check_state(state, u.shape[0])


def sample_shots(amplitudes: np.ndarray, shots: int, seed: int | None = None) -> ShotHistogram:
    """Multinomial measurement record of ``shots`` projective measurements."""
    if shots <= 0:
        raise ValidationError("shots must be positive")
    probs = np.abs(np.asarray(amplitudes, dtype=complex).reshape(-1)) ** 2
    total = probs.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise ValidationError(f"amplitudes carry total probability {total:.12g}")
    rng = np.random.default_rng(seed)
    draw = rng.multinomial(shots, probs / total)
    counts = {int(i): int(c) for i, c in enumerate(draw) if c}
    return ShotHistogram(shots=int(shots), counts=counts, seed=seed)


def retrieve_populations(
    hist: ShotHistogram, n_c: float, sigma0_fnorm: float = 1.0, ne: int = 2
) -> Populations:
    """sigma_jj = sqrt(P(j ne + j)) * n_c * |sigma0|_F."""
    diag = np.array(
        [np.sqrt(hist.probability(j * ne + j)) for j in range(ne)], dtype=float
    )
    return Populations(diag * n_c * sigma0_fnorm)


def exact_populations(
    amplitudes: np.ndarray, n_c: float, sigma0_fnorm: float = 1.0, ne: int = 2
) -> Populations:
    """Infinite-shot readout taken straight from the output amplitudes.

    The diagonal Liouville components are real, so the real part keeps the
    sign that a square root of probabilities would drop.
    """
    amps = np.asarray(amplitudes).reshape(-1)
    diag = np.array([amps[j * ne + j].real for j in range(ne)], dtype=float)
    return Populations(diag * n_c * sigma0_fnorm)


def write_histogram(hist: ShotHistogram, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh)
        w.writerow(["basis_index", "count"])
        for idx in sorted(hist.counts):
            w.writerow([idx, hist.counts[idx]])


def read_histogram(path: str | Path, seed: int | None = None) -> ShotHistogram:
    with open(path, newline="", encoding="ascii") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["basis_index", "count"]:
        raise SeriesFormatError("histogram CSV must start with 'basis_index,count'")
    counts = {}
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            idx, count = int(row[0]), int(row[1])
        except (ValueError, IndexError):
            raise SeriesFormatError(f"bad histogram row {row!r}", record=lineno) from None
        counts[idx] = count
    return ShotHistogram(shots=sum(counts.values()), counts=counts, seed=seed)
