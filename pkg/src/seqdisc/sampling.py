"""Random states, instruments, channels and ensembles for property checks and CLI sampling."""

from __future__ import annotations

import numpy as np

from .channels import Channel
from .instruments import Instrument, luders_from_projectors
from .states import DensityOperator, Ensemble


def ginibre(d: int, k: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(d, d, rng))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rows, cols, rng))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    rank = rank or int(rng.integers(1, d + 1))
    w = ginibre(d, rank, rng)
    m = w @ w.conj().T
    return DensityOperator(m / np.trace(m).real)


def random_qubit_bloch(rng: np.random.Generator, pure: bool = False) -> np.ndarray:
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return v if pure else v * rng.uniform() ** (1 / 3)


def random_priors(r: int, rng: np.random.Generator, floor: float = 0.02) -> tuple:
    q = rng.dirichlet(np.ones(r))
    q = floor + (1 - r * floor) * q
    return tuple(q / q.sum())


def random_ensemble(r: int, d: int, rng: np.random.Generator) -> Ensemble:
    return Ensemble(tuple(random_density(d, rng) for _ in range(r)), random_priors(r, rng))


def random_instrument(d: int, r: int, rng: np.random.Generator, n_kraus: int | None = None) -> Instrument:
    """Instrument with ``n_kraus`` Kraus operators per outcome cut from one isometry."""
    n_kraus = n_kraus or int(rng.integers(1, 3))
    v = random_isometry(r * n_kraus * d, d, rng)
    blocks = v.reshape(r, n_kraus, d, d)
    return Instrument(tuple(tuple(blocks[w, l] for l in range(n_kraus)) for w in range(r)))


def random_projective_instrument(d: int, r: int, rng: np.random.Generator) -> Instrument:
    """Luders instrument of a random orthogonal decomposition (some parts may be zero)."""
    u = random_unitary(d, rng)
    labels = rng.integers(0, r, size=d)
    projs = []
    for w in range(r):
        cols = u[:, labels == w]
        projs.append(cols @ cols.conj().T)
    return luders_from_projectors(projs)


def random_projector_pair(d: int, rng: np.random.Generator, rank: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    rank = int(rng.integers(0, d + 1)) if rank is None else rank
    u = random_unitary(d, rng)
    a, b = u[:, :rank], u[:, rank:]
    return a @ a.conj().T, b @ b.conj().T


def random_channel(d: int, rng: np.random.Generator, n_kraus: int | None = None) -> Channel:
    n_kraus = n_kraus or int(rng.integers(1, 4))
    v = random_isometry(n_kraus * d, d, rng)
    return Channel(tuple(v.reshape(n_kraus, d, d)))
