"""Density operators, qubit Bloch coordinates and discrimination ensembles."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionError,
    InvalidBlochVector,
    InvalidDensityOperator,
    InvalidEnsemble,
    InvalidParameter,
)
from .linalg import MAX_DIM, as_matrix, check_dim, dagger, is_hermitian

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)

STATE_TOL = 1e-10
PRIOR_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive, Hermitian, unit-trace matrix on C^d."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        check_dim(m.shape[0], MAX_DIM)
        if not is_hermitian(m, STATE_TOL):
            raise InvalidDensityOperator("density operator must be Hermitian")
        m = (m + dagger(m)) / 2
        tr = np.trace(m).real
        if abs(tr - 1) > STATE_TOL:
            raise InvalidDensityOperator(f"trace is {tr!r}, expected 1")
        if np.linalg.eigvalsh(m)[0] < -STATE_TOL:
            raise InvalidDensityOperator("density operator has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def __repr__(self):
        return f"DensityOperator(dim={self.dim})"


def pure_state(psi: Sequence[complex]) -> DensityOperator:
    """Projector onto the normalised vector ``psi``."""
    v = np.asarray(psi, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise InvalidDensityOperator("zero state vector")
    v = v / nrm
    return DensityOperator(np.outer(v, v.conj()))


def maximally_mixed(d: int) -> DensityOperator:
    return DensityOperator(np.eye(d) / d)


def bloch_operator(r: Sequence[float]) -> np.ndarray:
    """``r . sigma`` for a real 3-vector."""
    r = np.asarray(r, dtype=float)
    return r[0] * PAULI_X + r[1] * PAULI_Y + r[2] * PAULI_Z


def qubit_from_bloch(r: Sequence[float]) -> DensityOperator:
    r = np.asarray(r, dtype=float)
    if r.shape != (3,) or not np.all(np.isfinite(r)):
        raise InvalidBlochVector(f"Bloch vector must be a finite 3-vector, got {r!r}")
    if np.linalg.norm(r) > 1 + 1e-12:
        raise InvalidBlochVector(f"Bloch vector {r.tolist()} has norm > 1")
    return DensityOperator((np.eye(2) + bloch_operator(r)) / 2)


def bloch_from_qubit(rho) -> np.ndarray:
    m = rho.matrix if isinstance(rho, DensityOperator) else as_matrix(rho)
    if m.shape != (2, 2):
        raise DimensionError(f"Bloch vectors need a qubit, got dimension {m.shape[0]}")
    return np.array([np.trace(m @ s).real for s in PAULIS])


def spin_projector(n: Sequence[float], sign: int = 1) -> np.ndarray:
    """Spectral projector ``(I +/- n.sigma)/2`` of the spin along unit vector ``n``."""
    n = np.asarray(n, dtype=float)
    if abs(np.linalg.norm(n) - 1) > 1e-12:
        raise InvalidBlochVector("spin direction must be a unit vector")
    if sign not in (1, -1):
        raise InvalidParameter("sign must be +1 or -1")
    return (np.eye(2) + sign * bloch_operator(n)) / 2


@dataclass(frozen=True, eq=False)
class Ensemble:
    """States ``rho_j`` prepared with strictly positive priors ``q_j``."""

    states: tuple
    priors: tuple

    def __post_init__(self):
        states = tuple(s if isinstance(s, DensityOperator) else DensityOperator(s) for s in self.states)
        priors = tuple(float(q) for q in self.priors)
        if len(states) < 2:
            raise InvalidEnsemble("an ensemble needs at least two states")
        if len(priors) != len(states):
            raise InvalidEnsemble(f"{len(states)} states but {len(priors)} priors")
        if len({s.dim for s in states}) != 1:
            raise InvalidEnsemble("all states must share one dimension")
        if any(not np.isfinite(q) or q <= 0 for q in priors):
            raise InvalidEnsemble("priors must be strictly positive")
        if abs(sum(priors) - 1) > PRIOR_SUM_TOL:
            raise InvalidEnsemble(f"priors sum to {sum(priors)!r}, expected 1")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "priors", priors)

    @classmethod
    def from_bloch(cls, vectors, priors) -> "Ensemble":
        return cls(tuple(qubit_from_bloch(r) for r in vectors), tuple(priors))

    @property
    def r(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def weighted(self, j: int) -> np.ndarray:
        """``q_j rho_j`` for a 1-based label ``j``."""
        return self.priors[j - 1] * self.states[j - 1].matrix

    def difference(self, i: int = 1, j: int = 2) -> np.ndarray:
        """``q_i rho_i - q_j rho_j``."""
        return self.weighted(i) - self.weighted(j)

    def bloch_vectors(self) -> np.ndarray:
        return np.array([bloch_from_qubit(s) for s in self.states])


def mixture(e: Ensemble) -> DensityOperator:
    """Average state ``sum_j q_j rho_j``."""
    return DensityOperator(sum(q * s.matrix for q, s in zip(e.priors, e.states)))
