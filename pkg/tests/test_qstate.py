import numpy as np
import pytest
from numpy.testing import assert_allclose

from purilab import streams
from purilab.errors import BlochLengthExceedsOne, InvalidState, NegativeEigenvalue
from purilab.qstate import (
    InputEnsembleSpec,
    ancilla_state,
    binary_entropy_of_length,
    bloch_from_state,
    check_density_matrix,
    entropy_from_eigenvalues,
    fidelity_to_reference,
    input_fidelity,
    input_purity,
    make_input_state,
    purity,
    random_direction,
    state_from_bloch,
    von_neumann_entropy,
)


@pytest.mark.parametrize("p_w,p_in", [(0.3, 0.545), (0.6, 0.68), (0.75, 0.78125), (0.9, 0.905)])
def test_input_purity_table(p_w, p_in):
    assert abs(input_purity(p_w) - p_in) < 1e-12
    assert abs(purity(make_input_state(p_w, [0.0, 0.0, 1.0])) - p_in) < 1e-12


def test_input_fidelity():
    assert input_fidelity(0.75) == 0.875
    n = np.array([0.6, 0.0, 0.8])
    assert_allclose(fidelity_to_reference(make_input_state(0.75, n), n), 0.875)


def test_bloch_round_trip():
    l = np.array([[0.1, -0.2, 0.3], [0.0, 0.0, 1.0]])
    assert_allclose(bloch_from_state(state_from_bloch(l)), l, atol=1e-15)


def test_bloch_too_long():
    with pytest.raises(BlochLengthExceedsOne):
        state_from_bloch([0.0, 0.8, 0.8])


def test_non_unit_reference_rejected():
    with pytest.raises(ValueError):
        make_input_state(0.5, [0.0, 0.0, 0.9])


@pytest.mark.parametrize("q", [0.5, 0.82, 0.905, 1.0])
def test_ancilla_purity(q):
    rho = ancilla_state(q)
    assert_allclose(purity(rho), q)
    assert rho[0, 0].real >= rho[1, 1].real


def test_pure_ancilla_is_ground_state():
    assert_allclose(ancilla_state(1.0), np.diag([1.0, 0.0]))


def test_ensemble_spec_validation():
    spec = InputEnsembleSpec(0.75)
    assert spec.input_purity == 0.78125
    with pytest.raises(ValueError):
        InputEnsembleSpec(1.5)
    with pytest.raises(ValueError):
        InputEnsembleSpec(0.5, ancilla_purity=0.4)


def test_check_density_matrix():
    check_density_matrix(np.eye(2) / 2)
    with pytest.raises(InvalidState):
        check_density_matrix(np.eye(2))
    with pytest.raises(InvalidState):
        check_density_matrix(np.diag([1.5, -0.5]))


def test_entropy_clamp():
    assert_allclose(entropy_from_eigenvalues([0.5, 0.5, -1e-12]), 1.0)
    with pytest.raises(NegativeEigenvalue):
        entropy_from_eigenvalues([0.6, 0.5, -0.1])


def test_entropy_values():
    assert_allclose(von_neumann_entropy(np.eye(4) / 4), 2.0)
    assert_allclose(von_neumann_entropy(np.diag([1.0, 0.0])), 0.0, atol=1e-15)
    assert_allclose(binary_entropy_of_length(0.0), 1.0)


def test_sphere_moments():
    n = random_direction(streams.stream(0, streams.ORACLE, 5), size=200_000)
    assert_allclose(np.linalg.norm(n, axis=1), 1.0)
    assert_allclose(n.mean(axis=0), 0.0, atol=5e-3)
    assert_allclose(n.T @ n / len(n), np.eye(3) / 3, atol=5e-3)
