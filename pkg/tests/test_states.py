import numpy as np
import pytest
from conftest import FIG1, FIG2, seeds
from hypothesis import given
from hypothesis import strategies as st

from seqdisc.errors import (
    DimensionError,
    InvalidBlochVector,
    InvalidDensityOperator,
    InvalidEnsemble,
    InvalidParameter,
)
from seqdisc.sampling import random_density, random_priors, random_qubit_bloch
from seqdisc.states import (
    DensityOperator,
    Ensemble,
    bloch_from_qubit,
    maximally_mixed,
    mixture,
    pure_state,
    qubit_from_bloch,
    spin_projector,
)


@pytest.mark.parametrize(
    "r, expected",
    [((0, 0, 0), np.eye(2) / 2), ((0, 0, 1), np.diag([1.0, 0.0]))],
)
def test_qubit_from_bloch_examples(r, expected):
    np.testing.assert_allclose(qubit_from_bloch(r).matrix, expected, atol=1e-15)


def test_fig1_vector_purity():
    rho = qubit_from_bloch((0.3, 0.3, 0.3))
    assert rho.purity() == pytest.approx((1 + 0.27) / 2, abs=1e-12)


@pytest.mark.parametrize(
    "rho, expected",
    [
        (maximally_mixed(2), (0, 0, 0)),
        (qubit_from_bloch((0.2, 0.3, -0.4)), (0.2, 0.3, -0.4)),
        (pure_state([1, 1]), (1, 0, 0)),
    ],
)
def test_bloch_from_qubit_examples(rho, expected):
    np.testing.assert_allclose(bloch_from_qubit(rho), expected, atol=1e-12)


@given(seeds)
def test_bloch_round_trip(seed):
    r = random_qubit_bloch(np.random.default_rng(seed))
    np.testing.assert_allclose(bloch_from_qubit(qubit_from_bloch(r)), r, atol=1e-12)


@pytest.mark.parametrize("r", [(1, 1, 0), (0, 0, 1.01), (0, 0), (np.nan, 0, 0)])
def test_bad_bloch_vectors(r):
    with pytest.raises(InvalidBlochVector):
        qubit_from_bloch(r)


def test_bloch_needs_qubit():
    with pytest.raises(DimensionError):
        bloch_from_qubit(maximally_mixed(3))


@pytest.mark.parametrize(
    "m",
    [
        np.array([[1, 1], [0, 0]]),
        np.diag([0.6, 0.6]),
        np.diag([1.2, -0.2]),
    ],
)
def test_density_operator_rejects(m):
    with pytest.raises(InvalidDensityOperator):
        DensityOperator(m)


def test_density_operator_dimension_cap():
    with pytest.raises(DimensionError):
        maximally_mixed(17)


def test_density_operator_read_only():
    rho = maximally_mixed(2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


@given(seeds, st.integers(1, 5))
def test_random_states_are_valid(seed, d):
    rho = random_density(d, np.random.default_rng(seed))
    assert np.linalg.eigvalsh(rho.matrix)[0] > -1e-10
    assert np.trace(rho.matrix).real == pytest.approx(1.0)


@pytest.mark.parametrize(
    "states, priors",
    [
        ((maximally_mixed(2),), (1.0,)),
        ((maximally_mixed(2), maximally_mixed(2)), (0.5, 0.4)),
        ((maximally_mixed(2), maximally_mixed(2)), (1.0, 0.0)),
        ((maximally_mixed(2), maximally_mixed(3)), (0.5, 0.5)),
        ((maximally_mixed(2), maximally_mixed(2)), (0.5, 0.3, 0.2)),
    ],
)
def test_ensemble_rejects(states, priors):
    with pytest.raises(InvalidEnsemble):
        Ensemble(states, priors)


def test_mixture_identical_states():
    rho = qubit_from_bloch((0.1, -0.2, 0.3))
    np.testing.assert_allclose(mixture(Ensemble((rho, rho), (0.5, 0.5))).matrix, rho.matrix)


def test_mixture_fig1():
    e = Ensemble.from_bloch(FIG1, (0.5, 0.5))
    np.testing.assert_allclose(mixture(e).matrix, qubit_from_bloch((0.3, 0.3, 0)).matrix, atol=1e-15)


def test_mixture_orthogonal_pure():
    e = Ensemble((pure_state([1, 0]), pure_state([0, 1])), (0.5, 0.5))
    np.testing.assert_allclose(mixture(e).matrix, np.eye(2) / 2)


@given(seeds, st.integers(2, 5))
def test_mixture_bloch_is_average(seed, r):
    rng = np.random.default_rng(seed)
    vecs = [random_qubit_bloch(rng) for _ in range(r)]
    q = random_priors(r, rng)
    e = Ensemble.from_bloch(vecs, q)
    np.testing.assert_allclose(bloch_from_qubit(mixture(e)), np.dot(q, vecs), atol=1e-12)


def test_difference_fig2():
    e = Ensemble.from_bloch(FIG2, (0.55, 0.45))
    diff = bloch_from_qubit(e.difference())
    np.testing.assert_allclose(diff, 0.55 * np.array(FIG2[0]) - 0.45 * np.array(FIG2[1]), atol=1e-12)


@given(seeds)
def test_spin_projectors(seed):
    n = random_qubit_bloch(np.random.default_rng(seed), pure=True)
    p, m = spin_projector(n, 1), spin_projector(n, -1)
    np.testing.assert_allclose(p + m, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(p @ p, p, atol=1e-12)
    np.testing.assert_allclose(p @ m, 0, atol=1e-12)


def test_spin_projector_bad_input():
    with pytest.raises(InvalidBlochVector):
        spin_projector((0, 0, 0.5))
    with pytest.raises(InvalidParameter):
        spin_projector((0, 0, 1), 0)
