"""Sequential discrimination through noisy channels.

Covers general noisy chains and bounds, and the two-receiver qubit case
with depolarizing channels, where the optimum over first-receiver
instruments is computed both in closed form and by direct maximization over
the extreme instruments (spin projective measurements and the two trivial
instruments).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .channels import Channel, depolarizing
from .discrimination import Protocol, success_probability
from .errors import DimensionError, InvalidParameter, WrongArity
from .instruments import Instrument, luders_from_projectors, trivial_instrument
from .linalg import trace_norm
from .states import PAULIS, Ensemble, spin_projector

DEFAULT_GRID = 2048
REGIME_TOL = 1e-12


def noisy_success(p: Protocol, e: Ensemble, representation: str = "direct") -> float:
    """Success probability of a protocol whose receivers are separated by channels."""
    if p.channels is None:
        raise InvalidParameter("protocol has no channels; use success_probability")
    return success_probability(p, e, representation)


def noisy_upper_bound(e: Ensemble, first_channel: Channel) -> float:
    """``(1/r)(1 + sum_{i<j} ||L1[q_i rho_i - q_j rho_j]||_1)``."""
    total = sum(
        trace_norm(first_channel.apply(e.difference(i, j)))
        for i, j in combinations(range(1, e.r + 1), 2)
    )
    return (1 + total) / e.r


def first_stage_success(e: Ensemble, first_channel: Channel, m1: Instrument) -> float:
    return sum(
        q * float(np.trace(m1.apply(j, first_channel.apply(rho))).real)
        for j, (q, rho) in enumerate(zip(e.priors, e.states), start=1)
    )


def second_stage_norm_sum(e: Ensemble, first_channel: Channel, second_channel: Channel, m1: Instrument) -> float:
    """``sum_{i<j} ||L2[q_i M1(i)[L1 rho_i] - q_j M1(j)[L1 rho_j]]||_1``."""
    if m1.r != e.r:
        raise DimensionError("first receiver outcome count differs from ensemble size")
    branch = [q * m1.apply(j, first_channel.apply(rho)) for j, (q, rho) in enumerate(zip(e.priors, e.states), start=1)]
    return sum(trace_norm(second_channel.apply(branch[i] - branch[j])) for i, j in combinations(range(e.r), 2))


def noisy_two_seq_upper_bound(e: Ensemble, first_channel: Channel, second_channel: Channel, m1: Instrument) -> float:
    """Bound on two-receiver success for a fixed first receiver ``m1``.

    Valid for every second receiver; for two states, maximizing it over
    ``m1`` gives the optimal two-receiver success probability.
    """
    return (
        first_stage_success(e, first_channel, m1)
        + second_stage_norm_sum(e, first_channel, second_channel, m1)
    ) / e.r


# --- two qubit states, depolarizing channels ------------------------------------


@dataclass(frozen=True)
class ExtremeInstrument:
    """Spin measurement along ``n`` (outcome 1 on the ``sign`` eigenspace) or trivial answer ``j``."""

    kind: str
    n: tuple | None = None
    sign: int = 1
    j: int | None = None

    def __post_init__(self):
        if self.kind == "spin":
            if self.n is None or abs(np.linalg.norm(self.n) - 1) > 1e-12:
                raise InvalidParameter("spin instrument needs a unit direction")
            if self.sign not in (1, -1):
                raise InvalidParameter("sign must be +1 or -1")
        elif self.kind == "trivial":
            if self.j not in (1, 2):
                raise InvalidParameter("trivial instrument answers 1 or 2")
        else:
            raise InvalidParameter(f"unknown extreme instrument kind {self.kind!r}")

    def instrument(self) -> Instrument:
        if self.kind == "trivial":
            return trivial_instrument(self.j, 2, 2)
        return luders_from_projectors([spin_projector(self.n, self.sign), spin_projector(self.n, -self.sign)])


@dataclass(frozen=True)
class NoisyOptimum:
    value: float
    maximizer: ExtremeInstrument
    regime: str
    gamma2_thresholds: tuple

    @property
    def gamma2_1(self) -> float:
        return self.gamma2_thresholds[0]

    @property
    def gamma2_2(self) -> float:
        return self.gamma2_thresholds[1]


def _qubit_pair(e: Ensemble):
    if e.r != 2:
        raise WrongArity(f"defined for two states, got {e.r}")
    if e.dim != 2:
        raise DimensionError("defined for qubit states only")
    r = e.bloch_vectors()
    q1, q2 = e.priors
    return q1, q2, r[0], r[1]


def _check_gamma(*gammas):
    for g in gammas:
        if not 0.0 <= g <= 1.0:
            raise InvalidParameter(f"noise parameter {g} outside [0, 1]")


def _bloch_difference(e: Ensemble) -> np.ndarray:
    q1, q2, r1, r2 = _qubit_pair(e)
    return q1 * r1 - q2 * r2


def optimal_direction(e: Ensemble) -> np.ndarray:
    """Unit vector along ``q1 r1 - q2 r2``; ``(0, 0, 1)`` when that vector vanishes."""
    v = _bloch_difference(e)
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return np.array([0.0, 0.0, 1.0])
    return v / nv


def one_receiver_depolarizing_optimum(e: Ensemble, gamma1: float) -> float:
    """Helstrom value for the depolarized pair, in Bloch form."""
    _check_gamma(gamma1)
    q1, q2, _, _ = _qubit_pair(e)
    shrunk = 0.5 + 0.5 * (1 - gamma1) * np.linalg.norm(_bloch_difference(e))
    return max(shrunk, q1, q2)


def _thresholds(e: Ensemble, gamma1: float) -> tuple[float, float]:
    # gamma2 limits from the regime condition at n+ and from comparison with max prior
    q1, q2, r1, r2 = _qubit_pair(e)
    n = optimal_direction(e)
    a = 0.5 * q1 * (1 + (1 - gamma1) * np.dot(r1, n))
    b = 0.5 * q2 * (1 - (1 - gamma1) * np.dot(r2, n))
    p_plus = a + b
    g_1 = 2 * (1 - max(a, b) / p_plus)
    g_2 = 2 * (1 - max(q1, q2) / p_plus)
    return float(g_1), float(g_2)


def two_seq_depolarizing_closed(e: Ensemble, gamma1: float, gamma2: float) -> NoisyOptimum:
    """Closed-form optimum of two receivers behind depolarizing channels."""
    _check_gamma(gamma1, gamma2)
    q1, q2, _, _ = _qubit_pair(e)
    p_plus = 0.5 + 0.5 * (1 - gamma1) * np.linalg.norm(_bloch_difference(e))
    spin_value = (1 - gamma2 / 2) * p_plus
    qmax = max(q1, q2)
    thresholds = _thresholds(e, gamma1)
    if spin_value > qmax + REGIME_TOL:
        best = ExtremeInstrument("spin", tuple(float(x) for x in optimal_direction(e)), 1)
        return NoisyOptimum(float(spin_value), best, "helstrom-like", thresholds)
    best = ExtremeInstrument("trivial", j=1 if q1 >= q2 else 2)
    return NoisyOptimum(float(qmax), best, "trivial", thresholds)


def fibonacci_sphere(n: int) -> np.ndarray:
    """``n`` nearly uniform unit vectors (golden-angle spiral)."""
    if n < 1:
        raise InvalidParameter("grid must contain at least one point")
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    rho = np.sqrt(np.clip(1 - z * z, 0, None))
    theta = np.pi * (1 + 5 ** 0.5) * k
    return np.column_stack([rho * np.cos(theta), rho * np.sin(theta), z])


def _batched_spin_projectors(directions: np.ndarray, sign: int) -> np.ndarray:
    ns = np.einsum("mk,kab->mab", directions, np.stack(PAULIS))
    return (np.eye(2)[None] + sign * ns) / 2


def spin_objective(e: Ensemble, gamma1: float, gamma2: float, directions, sign: int = 1) -> np.ndarray:
    """Two-receiver objective for spin instruments along each row of ``directions``.

    Evaluates ``(1/2)(P1 + ||L2[q1 E L1[rho1] E - q2 E' L1[rho2] E']||_1)``
    with ``E = (I + sign n.sigma)/2`` and ``E' = I - E`` directly on 2x2
    matrices, batched over directions.
    """
    q1, q2, _, _ = _qubit_pair(e)
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    l1 = depolarizing(gamma1)
    s1, s2 = (l1.apply(s.matrix) for s in e.states)
    e1 = _batched_spin_projectors(directions, sign)
    e2 = np.eye(2)[None] - e1
    out1 = q1 * e1 @ s1[None] @ e1
    out2 = q2 * e2 @ s2[None] @ e2
    p1 = np.trace(out1, axis1=1, axis2=2).real + np.trace(out2, axis1=1, axis2=2).real
    diff = out1 - out2
    tr = np.trace(diff, axis1=1, axis2=2)
    noisy = (1 - gamma2) * diff + gamma2 * tr[:, None, None] * np.eye(2)[None] / 2
    noisy = (noisy + np.conj(np.swapaxes(noisy, 1, 2))) / 2
    norms = np.abs(np.linalg.eigvalsh(noisy)).sum(axis=1)
    return 0.5 * (p1 + norms)


def two_seq_depolarizing_numeric(
    e: Ensemble,
    gamma1: float,
    gamma2: float,
    grid: int = DEFAULT_GRID,
    include_analytic: bool = True,
) -> NoisyOptimum:
    """Maximize the two-receiver objective over extreme first-receiver instruments.

    Candidates are the two trivial instruments and spin instruments of both
    signs along a Fibonacci-sphere grid, plus (by default) the analytic
    directions ``+/- n+``.
    """
    if grid < 2:
        raise InvalidParameter("grid must contain at least two points")
    _check_gamma(gamma1, gamma2)
    q1, q2, _, _ = _qubit_pair(e)
    dirs = fibonacci_sphere(grid)
    if include_analytic:
        n_plus = optimal_direction(e)
        dirs = np.vstack([n_plus, -n_plus, dirs])
    best_value = max(q1, q2)
    best = ExtremeInstrument("trivial", j=1 if q1 >= q2 else 2)
    for sign in (1, -1):
        vals = spin_objective(e, gamma1, gamma2, dirs, sign)
        k = int(np.argmax(vals))
        if vals[k] > best_value + REGIME_TOL:
            best_value = float(vals[k])
            best = ExtremeInstrument("spin", tuple(float(x) for x in dirs[k] / np.linalg.norm(dirs[k])), sign)
    regime = "helstrom-like" if best.kind == "spin" else "trivial"
    return NoisyOptimum(float(best_value), best, regime, _thresholds(e, gamma1))


def depolarizing_protocol(e: Ensemble, gamma1: float, gamma2: float, receiver: Instrument | None = None) -> Protocol:
    """Two identical receivers, each behind a depolarizing channel.

    The default receiver measures spin along ``n+``, whose projectors are the
    Helstrom projectors of the depolarized pair.
    """
    if receiver is None:
        n = optimal_direction(e)
        receiver = luders_from_projectors([spin_projector(n, 1), spin_projector(n, -1)])
    return Protocol((receiver, receiver), (depolarizing(gamma1), depolarizing(gamma2)))
