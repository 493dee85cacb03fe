"""Spin-boson model: parameters, bath discretization, Hamiltonians, thermal bath.

Energies are in units of the electronic coupling Gamma and times in 1/Gamma.
State 0 is the donor |D>, state 1 the acceptor |A>.  Full-space operators are
ordered system (x) bath, with bath modes in increasing-frequency order.
"""

from __future__ import annotations

import dataclasses
import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .liouville import liouvillian_of

log = logging.getLogger(__name__)

DEFAULT_BATH_CAP = 4096
TRUNCATION_WARN = 1e-6

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class SpinBosonParams:
    epsilon: float
    gamma_coupling: float
    beta: float
    xi: float
    omega_c: float
    omega_max: float
    n_modes: int
    dt: float

    def __post_init__(self):
        positive = {
            "beta": self.beta,
            "omega_c": self.omega_c,
            "omega_max": self.omega_max,
            "dt": self.dt,
        }
        for name, value in positive.items():
            if not value > 0:
                raise ValidationError(f"{name} must be positive, got {value}")
        # Gamma = 0 (pure dephasing) is a useful limit, so only its sign is checked
        if self.gamma_coupling < 0:
            raise ValidationError(f"gamma_coupling must be nonnegative, got {self.gamma_coupling}")
        if self.xi < 0:
            raise ValidationError(f"xi must be nonnegative, got {self.xi}")
        if self.n_modes < 0:
            raise ValidationError("n_modes must be nonnegative")
        if self.omega_max <= self.omega_c:
            raise ValidationError("omega_max must exceed omega_c")

    def replace(self, **changes) -> SpinBosonParams:
        return dataclasses.replace(self, **changes)

    def system_hamiltonian(self) -> np.ndarray:
        """Bath-averaged electronic Hamiltonian eps*sigma_z + Gamma*sigma_x."""
        return self.epsilon * SIGMA_Z + self.gamma_coupling * SIGMA_X


# The four rows of the benchmark parameter table.
PRESETS: dict[str, SpinBosonParams] = {
    "model1": SpinBosonParams(1.0, 1.0, 5.0, 0.1, 1.0, 5.0, 60, 1.50083e-3),
    "model2": SpinBosonParams(1.0, 1.0, 5.0, 0.1, 2.0, 10.0, 60, 1.50083e-3),
    "model3": SpinBosonParams(1.0, 1.0, 5.0, 0.4, 2.0, 10.0, 60, 1.50083e-3),
    "model4": SpinBosonParams(0.0, 1.0, 5.0, 0.2, 2.5, 12.0, 60, 4.50249e-3),
}


def preset(name: str, **overrides) -> SpinBosonParams:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ValidationError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
        ) from None
    return base.replace(**overrides) if overrides else base


@dataclass(frozen=True)
class BathModes:
    omegas: np.ndarray
    couplings: np.ndarray

    def __len__(self) -> int:
        return len(self.omegas)

    def reorganization_energy(self) -> float:
        return float(np.sum(self.couplings**2 / (2.0 * self.omegas**2)))


@dataclass(frozen=True)
class TruncatedBathSpace:
    fock_dim: int
    cap: int = DEFAULT_BATH_CAP

    def __post_init__(self):
        if self.fock_dim < 2:
            raise ValidationError("fock_dim must be at least 2")

    def bath_dim(self, n_modes: int) -> int:
        return self.fock_dim**n_modes


def discretize_spectral_density(
    params: SpinBosonParams, scheme: str = "log"
) -> BathModes:
    """Sample ``{omega_k, c_k}`` from the Ohmic density with exponential cutoff.

    ``scheme="log"`` places modes so each carries an equal share of the
    reorganization energy, which then equals the truncated continuum value
    ``xi*omega_c/2 * (1 - exp(-omega_max/omega_c))`` exactly:

        omega_k = -omega_c * ln(1 - k/N * (1 - exp(-omega_max/omega_c)))
        c_k     = omega_k * sqrt(xi * omega_0),  omega_0 = omega_c/N * (1 - exp(...))

    ``scheme="uniform"`` is the right-endpoint Riemann grid
    ``omega_k = k * omega_max / N`` with ``c_k = omega_k sqrt(xi dw exp(-omega_k/omega_c))``.
    Both put the last mode at ``omega_max``.
    """
    n = params.n_modes
    if n < 1:
        raise ValidationError("n_modes must be at least 1")
    k = np.arange(1, n + 1, dtype=float)
    if scheme == "log":
        tail = 1.0 - np.exp(-params.omega_max / params.omega_c)
        omegas = -params.omega_c * np.log1p(-k / n * tail)
        omegas[-1] = params.omega_max  # log1p rounding
        omega_0 = params.omega_c / n * tail
        couplings = omegas * np.sqrt(params.xi * omega_0)
    elif scheme == "uniform":
        dw = params.omega_max / n
        omegas = k * dw
        couplings = omegas * np.sqrt(params.xi * dw * np.exp(-omegas / params.omega_c))
    else:
        raise ValidationError(f"unknown discretization scheme {scheme!r}")
    return BathModes(omegas=omegas, couplings=couplings)


def continuum_reorganization_energy(params: SpinBosonParams) -> float:
    """(1/pi) * integral_0^omega_max J(w)/w dw for the Ohmic density."""
    return 0.5 * params.xi * params.omega_c * (1 - np.exp(-params.omega_max / params.omega_c))


def ladder(d: int) -> np.ndarray:
    """Truncated annihilation operator on a d-level Fock space."""
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(complex)


def position_momentum(omega: float, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Mass-weighted R and P for one oscillator, from truncated ladder operators."""
    a = ladder(d)
    ad = a.conj().T
    r = (a + ad) / np.sqrt(2.0 * omega)
    p = 1j * np.sqrt(omega / 2.0) * (ad - a)
    return r, p


def _embed(op: np.ndarray, mode: int, n_modes: int, d: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    eye = np.eye(d, dtype=complex)
    for m in range(n_modes):
        out = np.kron(out, op if m == mode else eye)
    return out


def _check_cap(modes: BathModes, space: TruncatedBathSpace) -> int:
    dim = space.bath_dim(len(modes))
    if dim > space.cap:
        raise DimensionError(
            f"bath dimension {space.fock_dim}^{len(modes)} = {dim} exceeds cap {space.cap}"
        )
    return dim


def build_hamiltonians(
    params: SpinBosonParams, modes: BathModes, space: TruncatedBathSpace
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nuclear Hamiltonians H_D, H_A and the constant coupling V_DA on the bath space."""
    dim = _check_cap(modes, space)
    d = space.fock_dim
    n = len(modes)
    h_osc = np.zeros((dim, dim), dtype=complex)
    shift = np.zeros((dim, dim), dtype=complex)
    for k, (w, c) in enumerate(zip(modes.omegas, modes.couplings)):
        r, p = position_momentum(w, d)
        h1 = p @ p / 2.0 + 0.5 * w**2 * (r @ r)
        h_osc += _embed(h1, k, n, d)
        shift += c * _embed(r, k, n, d)
    eye = np.eye(dim, dtype=complex)
    h_d = params.epsilon * eye + h_osc - shift
    h_a = -params.epsilon * eye + h_osc + shift
    v_da = params.gamma_coupling * eye
    return h_d, h_a, v_da


def full_hamiltonian(
    params: SpinBosonParams, modes: BathModes, space: TruncatedBathSpace
) -> np.ndarray:
    """Assemble sum_j |j><j| (x) H_j + sum_{j!=k} |j><k| (x) V_jk."""
    h_d, h_a, v = build_hamiltonians(params, modes, space)
    p_d = np.diag([1.0, 0.0]).astype(complex)
    p_a = np.diag([0.0, 1.0]).astype(complex)
    up = np.array([[0, 1], [0, 0]], dtype=complex)
    return (
        np.kron(p_d, h_d)
        + np.kron(p_a, h_a)
        + np.kron(up, v)
        + np.kron(up.T, v.conj().T)
    )


def thermal_bath_state(
    params: SpinBosonParams, modes: BathModes, space: TruncatedBathSpace
) -> np.ndarray:
    """Normalized exp(-beta (H_D + H_A)/2) on the truncated bath.

    The +/- c_k R_k and +/- eps terms cancel in the average, so this is a
    product of bare thermal oscillators, diagonal in the Fock basis.
    """
    _check_cap(modes, space)
    d = space.fock_dim
    rho = np.ones((1, 1), dtype=complex)
    for w in modes.omegas:
        r, p = position_momentum(w, d)
        h1 = (p @ p / 2.0 + 0.5 * w**2 * (r @ r)).real
        # h1 is diagonal for truncated ladder operators
        energies = np.diag(h1)
        weights = np.exp(-params.beta * (energies - energies.min()))
        weights /= weights.sum()
        if weights[-1] > TRUNCATION_WARN:
            warnings.warn(
                f"mode omega={w:.4g}: top Fock level population {weights[-1]:.2e} "
                f"> {TRUNCATION_WARN:g}; increase fock_dim",
                RuntimeWarning,
                stacklevel=2,
            )
        rho = np.kron(rho, np.diag(weights).astype(complex))
    return rho


def projected_liouvillian(params: SpinBosonParams) -> np.ndarray:
    """Tr_n{rho_n(0) L} as a 4x4 superoperator.

    <R_k> vanishes in the thermal bath state, so only the electronic part
    survives; the common bath energy cancels in the commutator.
    """
    return liouvillian_of(params.system_hamiltonian())


def projected_liouvillian_bruteforce(
    params: SpinBosonParams, modes: BathModes, space: TruncatedBathSpace
) -> np.ndarray:
    """Tr_n{[H, sigma (x) rho_n]} column by column in the truncated space."""
    h = full_hamiltonian(params, modes, space)
    rho_n = thermal_bath_state(params, modes, space)
    nb = rho_n.shape[0]
    out = np.zeros((4, 4), dtype=complex)
    for k in range(2):
        for l in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[k, l] = 1.0
            x = np.kron(e, rho_n)
            comm = h @ x - x @ h
            red = np.einsum("injn->ij", comm.reshape(2, nb, 2, nb))
            out[:, 2 * k + l] = red.reshape(-1)
    return out
