"""Success probabilities of sequential conclusive discrimination and optimal protocols.

A protocol is a chain of receivers, each an ``r``-outcome instrument. The
chain succeeds on a state ``rho_j`` when every receiver reports ``j``.
Optional channels act on the system before each receiver.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import (
    ConditionNotSatisfied,
    DegenerateSpectrum,
    DimensionError,
    InvalidOperator,
    InvalidParameter,
    WrongArity,
)
from .instruments import (
    COMPLETENESS_TOL,
    PROB_FLOOR,
    Instrument,
    StatisticalRealization,
    compose_sequential,
    luders_from_projectors,
)
from .linalg import (
    ZERO_EIG_TOL,
    as_matrix,
    dagger,
    eig_hermitian,
    is_projector,
    is_unitary,
    op_norm,
    tol_for,
    trace_norm,
)
from .states import DensityOperator, Ensemble

CONDITION_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Protocol:
    """Receivers in order; ``channels[n]`` (if any) precedes ``receivers[n]``."""

    receivers: tuple
    channels: tuple | None = None

    def __post_init__(self):
        receivers = tuple(self.receivers)
        if not receivers:
            raise InvalidParameter("a protocol needs at least one receiver")
        if len({m.r for m in receivers}) != 1:
            raise DimensionError("all receivers must share one outcome set")
        if len({m.dim for m in receivers}) != 1:
            raise DimensionError("all receivers must act on one space")
        channels = self.channels
        if channels is not None:
            channels = tuple(channels)
            if len(channels) != len(receivers):
                raise DimensionError(f"{len(receivers)} receivers but {len(channels)} channels")
            if any(c.dim != receivers[0].dim for c in channels):
                raise DimensionError("channel dimension differs from receiver dimension")
        object.__setattr__(self, "receivers", receivers)
        object.__setattr__(self, "channels", channels)

    @property
    def n_receivers(self) -> int:
        return len(self.receivers)

    @property
    def r(self) -> int:
        return self.receivers[0].r

    @property
    def dim(self) -> int:
        return self.receivers[0].dim

    @property
    def noisy(self) -> bool:
        return self.channels is not None

    def with_channels(self, channels) -> "Protocol":
        return Protocol(self.receivers, tuple(channels))


@dataclass(frozen=True)
class DiscriminationResult:
    success_probability: float
    per_receiver_factors: tuple
    updated_priors: tuple


def _check(p: Protocol, e: Ensemble) -> None:
    if p.r != e.r:
        raise DimensionError(f"protocol has {p.r} outcomes but the ensemble has {e.r} states")
    if p.dim != e.dim:
        raise DimensionError(f"protocol acts on dimension {p.dim}, states have dimension {e.dim}")


def success_direct(p: Protocol, e: Ensemble) -> float:
    """``sum_j q_j tr M_chain(j,...,j)[rho_j]`` by nested application."""
    _check(p, e)
    chain = compose_sequential(p.receivers, p.channels)
    return sum(q * chain.probability((j,) * p.n_receivers, rho) for j, (q, rho) in enumerate(zip(e.priors, e.states), start=1))


def stage_probabilities(p: Protocol, e: Ensemble) -> np.ndarray:
    """Conditional per-receiver success probabilities, shape ``(r, N)``.

    Entry ``[j-1, n]`` is ``tr M_n(j)[tau]`` where ``tau`` is the normalised
    posterior of ``rho_j`` after receivers ``1..n-1`` all reported ``j``
    (with the channel preceding receiver ``n`` applied). A branch whose
    probability falls to ``PROB_FLOOR`` or below has no posterior; its later
    entries are 0.
    """
    _check(p, e)
    out = np.zeros((e.r, p.n_receivers))
    for j, rho in enumerate(e.states, start=1):
        t = rho.matrix
        for n, m in enumerate(p.receivers):
            if p.channels is not None:
                t = p.channels[n].apply(t)
            t = m.apply(j, t)
            f = float(np.trace(t).real)
            out[j - 1, n] = f
            if f <= PROB_FLOOR:
                break
            t = t / f
    return out


def success_chain(p: Protocol, e: Ensemble) -> float:
    """Sum over ``j`` of ``q_j`` times the product of per-stage traces against posteriors."""
    f = stage_probabilities(p, e)
    return float(np.dot(e.priors, np.prod(f, axis=1)))


def success_product(p: Protocol, e: Ensemble) -> DiscriminationResult:
    """Product of per-receiver success probabilities on updated ensembles."""
    f = stage_probabilities(p, e)
    priors = np.array(e.priors)
    factors, rows = [], []
    dead = False
    for n in range(p.n_receivers):
        rows.append(tuple(float(x) for x in priors))
        if dead:
            factors.append(0.0)
            continue
        factor = float(np.dot(priors, f[:, n]))
        factors.append(factor)
        if factor <= 0.0:
            dead = True
            continue
        priors = priors * f[:, n] / factor
    return DiscriminationResult(float(np.prod(factors)), tuple(factors), tuple(rows))


def success_probability(p: Protocol, e: Ensemble, representation: str = "direct") -> float:
    if representation == "direct":
        return success_direct(p, e)
    if representation == "chain":
        return success_chain(p, e)
    if representation == "product":
        return success_product(p, e).success_probability
    raise InvalidParameter(f"unknown representation {representation!r}")


def _require_pair(e: Ensemble) -> None:
    if e.r != 2:
        raise WrongArity(f"defined for two states, got {e.r}")


def helstrom_bound(e: Ensemble) -> float:
    _require_pair(e)
    return 0.5 * (1 + trace_norm(e.difference(1, 2)))


def multi_state_upper_bound(e: Ensemble) -> float:
    """``(1/r)(1 + sum_{i<j} ||q_i rho_i - q_j rho_j||_1)``."""
    total = sum(trace_norm(e.difference(i, j)) for i, j in combinations(range(1, e.r + 1), 2))
    return (1 + total) / e.r


def _helstrom_split(e: Ensemble):
    # eigenbasis of q1 rho1 - q2 rho2 split into strictly positive / non-positive parts
    h = e.difference(1, 2)
    w, v = eig_hermitian(h)
    pos = w > tol_for(h, ZERO_EIG_TOL)
    return v[:, pos], v[:, ~pos]


def helstrom_projectors(e: Ensemble) -> tuple[np.ndarray, np.ndarray]:
    """Projectors onto the positive and non-positive spectral subspaces of ``q1 rho1 - q2 rho2``."""
    _require_pair(e)
    v1, v2 = _helstrom_split(e)
    return v1 @ dagger(v1), v2 @ dagger(v2)


def rotated_kraus(e: Ensemble, phi) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Kraus operators ``sum_i |phi_i(j)><v_i(j)|`` and projectors ``sum_i |phi_i(j)><phi_i(j)|``.

    ``phi`` is a unitary whose first ``rank P0(1)`` columns form the basis
    for outcome 1 and the remaining columns the basis for outcome 2.
    """
    _require_pair(e)
    phi = as_matrix(phi)
    if phi.shape != (e.dim, e.dim) or not is_unitary(phi):
        raise InvalidParameter("rotation basis must be a unitary matrix on the state space")
    v1, v2 = _helstrom_split(e)
    k1 = v1.shape[1]
    if k1 == 0 or v2.shape[1] == 0:
        raise DegenerateSpectrum("a Helstrom projector vanishes; rotated protocol undefined")
    f1, f2 = phi[:, :k1], phi[:, k1:]
    kraus = [f1 @ dagger(v1), f2 @ dagger(v2)]
    projs = [f1 @ dagger(f1), f2 @ dagger(f2)]
    return kraus, projs


def optimal_two_state_protocol(
    e: Ensemble,
    n_receivers: int,
    variant: str = "projective",
    phi=None,
    channels=None,
) -> Protocol:
    """Protocol attaining the Helstrom bound for every number of receivers.

    ``variant="projective"`` uses the Luders instrument of the Helstrom
    projectors at every stage. ``variant="rotated"`` uses the rotated Kraus
    operators built from ``phi`` for the first receiver and the Luders
    instrument of the rotated projectors afterwards.
    """
    _require_pair(e)
    if n_receivers < 1:
        raise InvalidParameter("need at least one receiver")
    if variant == "projective":
        luders = luders_from_projectors(helstrom_projectors(e))
        receivers = (luders,) * n_receivers
    elif variant == "rotated":
        if phi is None:
            raise InvalidParameter("rotated variant needs a basis 'phi'")
        kraus, projs = rotated_kraus(e, phi)
        receivers = (Instrument(tuple((k,) for k in kraus)),) + (luders_from_projectors(projs),) * (n_receivers - 1)
    else:
        raise InvalidParameter(f"unknown variant {variant!r}")
    return Protocol(receivers, None if channels is None else tuple(channels))


def check_range_condition(kraus: Sequence, projectors: Sequence, tol: float = CONDITION_TOL) -> float:
    """Largest violation of ``K(j)^dag P(j) K(j) = K(j)^dag K(j)`` over ``j``."""
    if len(kraus) != len(projectors):
        raise DimensionError("need one projector per outcome")
    worst = 0.0
    for k, p in zip(kraus, projectors):
        k, p = as_matrix(k), as_matrix(p)
        if k.shape != p.shape:
            raise DimensionError("Kraus operator and projector shapes differ")
        worst = max(worst, op_norm(dagger(k) @ p @ k - dagger(k) @ k))
    if worst > tol:
        raise ConditionNotSatisfied(f"K^dag P K differs from K^dag K by {worst:.3g}")
    return worst


def range_condition_protocol(kraus: Sequence, projectors: Sequence, n_receivers: int) -> Protocol:
    """First receiver uses ``kraus`` (one operator per outcome); later ones are Luders on ``projectors``.

    Success is then independent of ``n_receivers``. Optimality of the first
    receiver's measurement is the caller's responsibility.
    """
    if n_receivers < 1:
        raise InvalidParameter("need at least one receiver")
    check_range_condition(kraus, projectors)
    later = luders_from_projectors(projectors)
    first = Instrument(tuple((as_matrix(k),) for k in kraus))
    return Protocol((first,) + (later,) * (n_receivers - 1))


def indirect_realization_for_optimal(p0: Sequence, b=None) -> StatisticalRealization:
    """Qubit-ancilla realization of the Luders instrument ``{P0(1), P0(2)}``.

    ``U = P0(1) (x) I + P0(2) (x) (|b'><b| + |b><b'|)`` with ``b'`` orthogonal to ``b``.
    """
    if len(p0) != 2:
        raise InvalidOperator("need exactly two projectors")
    p1, p2 = (as_matrix(p) for p in p0)
    if p1.shape != p2.shape or not (is_projector(p1) and is_projector(p2)):
        raise InvalidOperator("inputs must be orthogonal projectors of equal shape")
    if op_norm(p1 + p2 - np.eye(p1.shape[0])) > COMPLETENESS_TOL or op_norm(p1 @ p2) > COMPLETENESS_TOL:
        raise InvalidOperator("projectors must be orthogonal and sum to identity")
    b = np.array([1.0, 0.0], dtype=complex) if b is None else np.asarray(b, dtype=complex)
    if b.shape != (2,) or abs(np.linalg.norm(b) - 1) > 1e-12:
        raise InvalidOperator("ancilla vector must be a unit vector in C^2")
    b_perp = np.array([-b[1].conjugate(), b[0].conjugate()])
    flip = np.outer(b_perp, b.conj()) + np.outer(b, b_perp.conj())
    u = np.kron(p1, np.eye(2)) + np.kron(p2, flip)
    sigma = DensityOperator(np.outer(b, b.conj()))
    return StatisticalRealization(sigma, (np.outer(b, b.conj()), np.outer(b_perp, b_perp.conj())), u)
