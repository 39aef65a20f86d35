"""Trace-preserving channels given by Kraus families."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidChannel, InvalidParameter
from .linalg import MAX_DIM, as_matrix, check_dim, dagger, op_norm
from .states import PAULIS, DensityOperator

TP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Channel:
    kraus: tuple

    def __post_init__(self):
        ks = tuple(as_matrix(k) for k in self.kraus)
        if not ks:
            raise InvalidChannel("channel needs at least one Kraus operator")
        d = ks[0].shape[0]
        check_dim(d, MAX_DIM)
        if any(k.shape != (d, d) for k in ks):
            raise DimensionError("Kraus operators must share one shape")
        if op_norm(sum(dagger(k) @ k for k in ks) - np.eye(d)) > TP_TOL:
            raise InvalidChannel("channel is not trace preserving: sum K^dag K != I")
        object.__setattr__(self, "kraus", ks)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def apply(self, t) -> np.ndarray:
        """Action on any operator (linear extension beyond states)."""
        t = t.matrix if isinstance(t, DensityOperator) else np.asarray(t, dtype=complex)
        if t.shape != (self.dim, self.dim):
            raise DimensionError(f"operator of shape {t.shape} on a dimension-{self.dim} channel")
        return sum(k @ t @ dagger(k) for k in self.kraus)

    __call__ = apply


def identity_channel(d: int) -> Channel:
    return Channel((np.eye(d),))


def depolarizing(gamma: float, d: int = 2) -> Channel:
    """Qubit depolarizing channel ``(1-g) T + g tr(T) I/2``."""
    if d != 2:
        raise DimensionError("only the qubit depolarizing channel is provided; pass explicit Kraus operators otherwise")
    gamma = float(gamma)
    if not 0.0 <= gamma <= 1.0:
        raise InvalidParameter(f"depolarizing parameter {gamma} outside [0, 1]")
    ks = [np.sqrt(1 - 3 * gamma / 4) * np.eye(2)]
    ks += [np.sqrt(gamma) / 2 * s for s in PAULIS]
    return Channel(tuple(ks))


def apply_channel(c: Channel, rho):
    """Apply ``c``; states map to states, other operators to plain arrays."""
    out = c.apply(rho)
    if isinstance(rho, DensityOperator):
        return DensityOperator(out)
    return out
