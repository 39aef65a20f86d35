"""Dense complex matrix kernel.

All tolerances are relative to the operator (spectral) norm of the input,
with an absolute floor of ``ABS_FLOOR``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionError, InvalidOperator

MAX_DIM = 16
HERMITIAN_TOL = 1e-10
ZERO_EIG_TOL = 1e-10
ABS_FLOOR = 1e-14


class HermitianEig(NamedTuple):
    """Eigenvalues in descending order with matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a, square: bool = True) -> np.ndarray:
    """Coerce ``a`` to a finite complex 2-D array (a copy)."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise InvalidOperator(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidOperator("matrix has non-finite entries")
    return m


def check_dim(d: int, limit: int = MAX_DIM) -> None:
    if d < 1 or d > limit:
        raise DimensionError(f"dimension {d} outside supported range 1..{limit}")


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def op_norm(a: np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def tol_for(a: np.ndarray, rel: float) -> float:
    return max(rel * op_norm(a), ABS_FLOOR)


def is_hermitian(a: np.ndarray, rel: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return op_norm(a - dagger(a)) <= tol_for(a, rel)


def _require_hermitian(h) -> np.ndarray:
    h = as_matrix(h)
    if not is_hermitian(h):
        raise InvalidOperator("operator is not Hermitian within tolerance")
    return (h + dagger(h)) / 2


def _fix_phases(v: np.ndarray) -> np.ndarray:
    # first component with non-negligible modulus made real positive, per column
    v = v.copy()
    for k in range(v.shape[1]):
        col = v[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-8)
        if idx.size:
            c = col[idx[0]]
            v[:, k] = col * (abs(c) / c)
    return v


def eig_hermitian(h) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Eigenvector phases are fixed so the first non-negligible component of
    each column is real and positive, which makes downstream protocols
    reproducible.
    """
    h = _require_hermitian(h)
    w, v = np.linalg.eigh(h)
    order = np.argsort(-w, kind="stable")
    return HermitianEig(w[order], _fix_phases(v[:, order]))


def trace_norm(h) -> float:
    """Sum of absolute eigenvalues of a Hermitian operator."""
    h = _require_hermitian(h)
    return float(np.sum(np.abs(np.linalg.eigvalsh(h))))


def positive_part(h) -> np.ndarray:
    """Positive part ``X+`` of ``X = X+ - X-``."""
    w, v = eig_hermitian(h)
    return (v * np.clip(w, 0, None)) @ dagger(v)


def positive_projector(h, eps: float | None = None) -> np.ndarray:
    """Orthogonal projector onto the eigenspaces of ``h`` with eigenvalue > eps.

    The default ``eps`` is ``1e-10 * ||h||`` so that numerically zero
    eigenvalues fall into the complementary projector.
    """
    h = as_matrix(h)
    w, v = eig_hermitian(h)
    if eps is None:
        eps = tol_for(h, ZERO_EIG_TOL)
    keep = v[:, w > eps]
    p = keep @ dagger(keep)
    return (p + dagger(p)) / 2


def tensor(a, b) -> np.ndarray:
    return np.kron(as_matrix(a, square=False), as_matrix(b, square=False))


def partial_trace_second(m, dim_second: int) -> np.ndarray:
    """Trace out the second factor of an operator on ``H (x) H~``."""
    m = as_matrix(m)
    n = m.shape[0]
    if dim_second < 1 or n % dim_second:
        raise DimensionError(f"cannot factor dimension {n} with second factor {dim_second}")
    d = n // dim_second
    return np.einsum("iaja->ij", m.reshape(d, dim_second, d, dim_second))


def is_projector(p: np.ndarray, tol: float = 1e-10) -> bool:
    p = np.asarray(p)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        return False
    return op_norm(p @ p - p) <= tol and op_norm(p - dagger(p)) <= tol


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return op_norm(dagger(u) @ u - np.eye(u.shape[0])) <= tol
