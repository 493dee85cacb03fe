from __future__ import annotations

import numpy as np


def random_density(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def random_contraction(rng: np.random.Generator, n: int, top: float | None = None) -> np.ndarray:
    """Random matrix with largest singular value ``top`` (uniform in (0, 1] if None)."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    u, s, vh = np.linalg.svd(a)
    s = rng.uniform(0, 1, size=n)
    s[0] = rng.uniform(0, 1) if top is None else top
    s = np.minimum(s, s[0])
    return (u * s) @ vh
