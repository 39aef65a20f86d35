"""Quantum instruments in Kraus form.

Outcomes are labelled ``1..r``. An instrument value ``M(w)[T]`` is the
unnormalised map ``sum_l K_l(w) T K_l(w)^dag``; it is applied to arbitrary
trace-class operators, not only to states.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionError,
    IncompleteProjectors,
    InvalidInstrument,
    InvalidRealization,
    NotPureDilation,
    ZeroProbabilityOutcome,
)
from .linalg import (
    MAX_DIM,
    as_matrix,
    check_dim,
    dagger,
    eig_hermitian,
    is_projector,
    is_unitary,
    op_norm,
    partial_trace_second,
    tensor,
)
from .states import DensityOperator

COMPLETENESS_TOL = 1e-10
PROB_FLOOR = 1e-12


def _op(x) -> np.ndarray:
    return x.matrix if isinstance(x, DensityOperator) else np.asarray(x, dtype=complex)


@dataclass(frozen=True, eq=False)
class Instrument:
    """Kraus families ``kraus[w-1] = (K_1(w), ..., K_L(w))``."""

    kraus: tuple

    def __post_init__(self):
        if len(self.kraus) < 1:
            raise InvalidInstrument("instrument needs at least one outcome")
        families = []
        for w, fam in enumerate(self.kraus, start=1):
            if isinstance(fam, np.ndarray) and fam.ndim == 2:
                fam = (fam,)
            fam = tuple(as_matrix(k) for k in fam)
            if not fam:
                raise InvalidInstrument(f"outcome {w} has no Kraus operators")
            families.append(fam)
        d = families[0][0].shape[0]
        check_dim(d, MAX_DIM)
        total = np.zeros((d, d), dtype=complex)
        for w, fam in enumerate(families, start=1):
            for k in fam:
                if k.shape != (d, d):
                    raise DimensionError(f"Kraus operator for outcome {w} has shape {k.shape}, expected {(d, d)}")
                if op_norm(k) > 1 + COMPLETENESS_TOL:
                    raise InvalidInstrument(f"Kraus operator for outcome {w} has norm > 1")
                total += dagger(k) @ k
        if op_norm(total - np.eye(d)) > COMPLETENESS_TOL:
            raise InvalidInstrument("Kraus operators are not complete: sum K^dag K != I")
        for fam in families:
            for k in fam:
                k.setflags(write=False)
        object.__setattr__(self, "kraus", tuple(families))

    @property
    def dim(self) -> int:
        return self.kraus[0][0].shape[0]

    @property
    def r(self) -> int:
        return len(self.kraus)

    @property
    def outcomes(self) -> range:
        return range(1, self.r + 1)

    def __getitem__(self, w: int) -> tuple:
        if not 1 <= w <= self.r:
            raise KeyError(f"outcome {w} not in 1..{self.r}")
        return self.kraus[w - 1]

    def apply(self, w: int, t) -> np.ndarray:
        t = _op(t)
        if t.shape != (self.dim, self.dim):
            raise DimensionError(f"operator of shape {t.shape} on a dimension-{self.dim} instrument")
        return sum(k @ t @ dagger(k) for k in self[w])

    def total(self, t) -> np.ndarray:
        """Unconditional map ``M(Omega)[T]``."""
        return sum(self.apply(w, t) for w in self.outcomes)

    def dual(self, w: int, y) -> np.ndarray:
        """Observable instrument ``N(w)[Y] = sum_l K^dag Y K``."""
        y = np.asarray(y, dtype=complex)
        return sum(dagger(k) @ y @ k for k in self[w])


@dataclass(frozen=True, eq=False)
class POVM:
    elements: tuple

    def __post_init__(self):
        els = tuple(as_matrix(m) for m in self.elements)
        d = els[0].shape[0]
        for w, m in enumerate(els, start=1):
            if m.shape != (d, d):
                raise DimensionError("POVM elements must share one shape")
            if op_norm(m - dagger(m)) > COMPLETENESS_TOL or np.linalg.eigvalsh((m + dagger(m)) / 2)[0] < -COMPLETENESS_TOL:
                raise InvalidInstrument(f"POVM element {w} is not positive semidefinite")
        if op_norm(sum(els) - np.eye(d)) > COMPLETENESS_TOL:
            raise InvalidInstrument("POVM elements do not sum to identity")
        object.__setattr__(self, "elements", els)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __getitem__(self, w: int) -> np.ndarray:
        return self.elements[w - 1]


def povm_of(m: Instrument) -> POVM:
    return POVM(tuple(m.dual(w, np.eye(m.dim)) for w in m.outcomes))


def outcome_probability(m: Instrument, w: int, rho) -> float:
    """``mu(w | rho) = tr M(w)[rho]``."""
    return float(np.trace(m.apply(w, rho)).real)


def posterior(m: Instrument, w: int, rho) -> DensityOperator:
    """Conditional posterior state after observing ``w``."""
    out = m.apply(w, rho)
    p = float(np.trace(out).real)
    if p <= PROB_FLOOR:
        raise ZeroProbabilityOutcome(f"outcome {w} has probability {p:.3g}")
    return DensityOperator(out / p)


def luders_from_projectors(projs: Sequence) -> Instrument:
    """Instrument ``M(j)[.] = P(j) . P(j)`` for a complete orthogonal family."""
    ps = [as_matrix(p) for p in projs]
    if not ps:
        raise IncompleteProjectors("no projectors given")
    d = ps[0].shape[0]
    for j, p in enumerate(ps, start=1):
        if p.shape != (d, d):
            raise DimensionError("projectors must share one shape")
        if not is_projector(p):
            raise IncompleteProjectors(f"element {j} is not an orthogonal projector")
    for a in range(len(ps)):
        for b in range(a + 1, len(ps)):
            if op_norm(ps[a] @ ps[b]) > COMPLETENESS_TOL:
                raise IncompleteProjectors(f"projectors {a + 1} and {b + 1} are not orthogonal")
    if op_norm(sum(ps) - np.eye(d)) > COMPLETENESS_TOL:
        raise IncompleteProjectors("projectors do not sum to identity")
    return Instrument(tuple((p,) for p in ps))


def identity_instrument(d: int) -> Instrument:
    return Instrument(((np.eye(d),),))


def trivial_instrument(j: int, r: int = 2, d: int = 2) -> Instrument:
    """Instrument that always reports ``j`` and leaves the state unchanged."""
    fams = [(np.zeros((d, d)),) for _ in range(r)]
    fams[j - 1] = (np.eye(d),)
    return Instrument(tuple(fams))


class SequentialInstrument:
    """Consecutive measurement ``M_k(j_k)[... M_1(j_1)[.] ...]``, evaluated lazily.

    ``channels[n]``, when given, acts before receiver ``n``.
    """

    def __init__(self, instruments: Sequence[Instrument], channels: Sequence | None = None):
        self.instruments = tuple(instruments)
        if not self.instruments:
            raise InvalidInstrument("need at least one instrument")
        dims = {m.dim for m in self.instruments}
        if len(dims) != 1:
            raise DimensionError("sequential instruments must share one dimension")
        if channels is not None:
            channels = tuple(channels)
            if len(channels) != len(self.instruments):
                raise DimensionError("need exactly one channel per receiver")
            if any(c.dim != self.dim for c in channels):
                raise DimensionError("channel dimension differs from instrument dimension")
        self.channels = channels

    @property
    def dim(self) -> int:
        return self.instruments[0].dim

    @property
    def length(self) -> int:
        return len(self.instruments)

    def outcome_tuples(self) -> Iterable[tuple]:
        return product(*(m.outcomes for m in self.instruments))

    def apply(self, outcomes: Sequence[int], t) -> np.ndarray:
        if len(outcomes) != self.length:
            raise DimensionError(f"expected {self.length} outcomes, got {len(outcomes)}")
        t = _op(t)
        for n, (m, w) in enumerate(zip(self.instruments, outcomes)):
            if self.channels is not None:
                t = self.channels[n].apply(t)
            t = m.apply(w, t)
        return t

    def probability(self, outcomes: Sequence[int], rho) -> float:
        return float(np.trace(self.apply(outcomes, rho)).real)

    def __call__(self, outcomes, t):
        return self.apply(outcomes, t)


def compose_sequential(ms: Sequence[Instrument], channels: Sequence | None = None) -> SequentialInstrument:
    return SequentialInstrument(ms, channels)


@dataclass(frozen=True, eq=False)
class StatisticalRealization:
    """Ancilla state, ancilla projections and joint unitary on ``H (x) H~``."""

    ancilla_state: DensityOperator
    projections: tuple
    unitary: np.ndarray

    def __post_init__(self):
        sigma = self.ancilla_state
        if not isinstance(sigma, DensityOperator):
            sigma = DensityOperator(sigma)
        a = sigma.dim
        projs = tuple(as_matrix(p) for p in self.projections)
        if not projs:
            raise InvalidRealization("no ancilla projections")
        for j, p in enumerate(projs, start=1):
            if p.shape != (a, a) or not is_projector(p):
                raise InvalidRealization(f"ancilla projection {j} is not a projector on C^{a}")
        for i in range(len(projs)):
            for j in range(i + 1, len(projs)):
                if op_norm(projs[i] @ projs[j]) > COMPLETENESS_TOL:
                    raise InvalidRealization("ancilla projections are not mutually orthogonal")
        if op_norm(sum(projs) - np.eye(a)) > COMPLETENESS_TOL:
            raise InvalidRealization("ancilla projections do not sum to identity")
        u = as_matrix(self.unitary)
        if u.shape[0] % a or not is_unitary(u):
            raise InvalidRealization("joint operator is not a unitary on H (x) H~")
        check_dim(u.shape[0] // a, MAX_DIM)
        object.__setattr__(self, "ancilla_state", sigma)
        object.__setattr__(self, "projections", projs)
        object.__setattr__(self, "unitary", u)

    @property
    def ancilla_dim(self) -> int:
        return self.ancilla_state.dim

    @property
    def dim(self) -> int:
        return self.unitary.shape[0] // self.ancilla_dim

    def apply(self, w: int, t) -> np.ndarray:
        """``tr_H~{(I (x) P(w)) U (T (x) sigma) U^dag (I (x) P(w))}`` evaluated literally."""
        t = _op(t)
        if t.shape != (self.dim, self.dim):
            raise DimensionError("operator does not act on the system space")
        proj = tensor(np.eye(self.dim), self.projections[w - 1])
        u = self.unitary
        joint = proj @ u @ tensor(t, self.ancilla_state.matrix) @ dagger(u) @ proj
        return partial_trace_second(joint, self.ancilla_dim)


def _ancilla_slice(u: np.ndarray, d: int, a: int, xi: np.ndarray, b: np.ndarray) -> np.ndarray:
    # (I (x) <xi|) U (I (x) |b>)
    u4 = u.reshape(d, a, d, a)
    return np.einsum("a,iajb,b->ij", xi.conj(), u4, b)


def instrument_from_realization(xi: StatisticalRealization) -> Instrument:
    """Kraus form of the instrument induced by an indirect measurement.

    With ``sigma = sum_k s_k |b_k><b_k|`` and ``P(w) = sum_m |x_m><x_m|`` the
    Kraus operators are ``sqrt(s_k) <x_m| U |b_k>``.
    """
    d, a = xi.dim, xi.ancilla_dim
    s, bvecs = eig_hermitian(xi.ancilla_state.matrix)
    families = []
    for p in xi.projections:
        pw, pv = eig_hermitian(p)
        fam = []
        for m in np.flatnonzero(pw > 0.5):
            for k in np.flatnonzero(s > PROB_FLOOR):
                fam.append(np.sqrt(s[k]) * _ancilla_slice(xi.unitary, d, a, pv[:, m], bvecs[:, k]))
        families.append(tuple(fam) or (np.zeros((d, d)),))
    return Instrument(tuple(families))


def kraus_from_dilation(xi: StatisticalRealization) -> list[np.ndarray]:
    """One Kraus operator per outcome, ``K(w) = <xi_w| U |b>``.

    Requires a pure ancilla state and rank-one ancilla projections.
    """
    if abs(xi.ancilla_state.purity() - 1) > COMPLETENESS_TOL:
        raise NotPureDilation("ancilla state is not pure")
    _, bvecs = eig_hermitian(xi.ancilla_state.matrix)
    b = bvecs[:, 0]
    out = []
    for w, p in enumerate(xi.projections, start=1):
        if abs(np.trace(p).real - 1) > COMPLETENESS_TOL:
            raise NotPureDilation(f"ancilla projection {w} is not rank one")
        _, pv = eig_hermitian(p)
        out.append(_ancilla_slice(xi.unitary, xi.dim, xi.ancilla_dim, pv[:, 0], b))
    return out

