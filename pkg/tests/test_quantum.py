import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontolab.exceptions import DimensionMismatch, InvariantViolation
from ontolab.quantum import (
    ProductState,
    ProjectiveMeasurement,
    PureState,
    bloch_angles,
    bloch_state,
    bloch_vector,
    born_probabilities,
    canonical_amplitudes,
    computational_basis,
    inner_product,
    ket0,
    ket1,
    ket_minus,
    ket_plus,
    orthogonality_table,
    pbr_entangled_basis,
    pbr_preparations,
    qubit_basis,
    ray_equal,
    tensor,
)

angles = st.floats(min_value=0.0, max_value=np.pi, allow_nan=False)
azimuths = st.floats(min_value=0.0, max_value=2 * np.pi, allow_nan=False)


def test_state_must_be_normalized():
    with pytest.raises(InvariantViolation, match="amplitudes"):
        PureState([1.0, 1.0])
    state = PureState.from_amplitudes([1.0, 1.0])
    assert np.allclose(state.amplitudes, ket_plus().amplitudes)
    with pytest.raises(InvariantViolation):
        PureState.from_amplitudes([0.0, 0.0])


def test_state_is_read_only():
    state = ket0()
    with pytest.raises(ValueError):
        state.amplitudes[0] = 0.0


def test_inner_product_dimensions():
    assert inner_product(ket0(), ket1()) == 0
    assert np.isclose(inner_product(ket_plus(), ket0()), 1 / np.sqrt(2))
    with pytest.raises(DimensionMismatch):
        inner_product(ket0(), tensor(ket0(), ket0()).joint)


def test_ray_equality_ignores_global_phase():
    state = bloch_state(0.7, 1.3)
    shifted = PureState(np.exp(0.4j) * state.amplitudes)
    assert ray_equal(state, shifted)
    assert state.ray_equal(shifted)
    assert not ray_equal(ket0(), ket_plus())
    assert not ray_equal(ket0(), tensor(ket0(), ket0()).joint)


def test_measurement_validation():
    computational_basis(3)
    with pytest.raises(InvariantViolation, match="not orthogonal"):
        ProjectiveMeasurement((ket0(), bloch_state(np.pi - 1e-3)))
    with pytest.raises(InvariantViolation, match="span"):
        ProjectiveMeasurement((ket0(),))


def test_skewed_basis_rejected():
    """
    A basis rotated away from orthogonality by 1e-3 rad must be rejected.
    """
    skew = 1e-3
    first = PureState([1.0, 0.0])
    second = PureState([np.sin(skew), np.cos(skew)])
    with pytest.raises(InvariantViolation):
        ProjectiveMeasurement((first, second))


def test_born_probabilities():
    m = computational_basis(2)
    assert np.allclose(born_probabilities(ket_plus(), m), [0.5, 0.5])
    assert np.allclose(born_probabilities(bloch_state(np.pi / 3), m), [0.75, 0.25])
    with pytest.raises(DimensionMismatch):
        born_probabilities(ket0(), computational_basis(4))


@settings(max_examples=200, deadline=None)
@given(theta=angles, phi=azimuths, basis_theta=angles, basis_phi=azimuths)
def test_born_probabilities_sum_to_one(theta, phi, basis_theta, basis_phi):
    probs = born_probabilities(bloch_state(theta, phi), qubit_basis(basis_theta, basis_phi))
    assert np.all(probs >= 0.0)
    assert abs(probs.sum() - 1.0) < 1e-12


@settings(max_examples=200, deadline=None)
@given(theta=angles, phi=azimuths)
def test_bloch_angles_invert_bloch_state(theta, phi):
    state = bloch_state(theta, phi)
    theta_back, phi_back = bloch_angles(state)
    assert np.isclose(theta_back, theta, atol=1e-7)
    assert ray_equal(bloch_state(theta_back, phi_back), state, tol=1e-9)
    assert np.isclose(np.linalg.norm(bloch_vector(state)), 1.0)
    assert np.isclose(bloch_vector(state)[2], np.cos(theta))


def test_canonical_amplitudes():
    minus = PureState(-ket_minus().amplitudes)
    amps = canonical_amplitudes(minus)
    assert amps[0].real > 0 and abs(amps[0].imag) < 1e-15
    assert np.allclose(amps, ket_minus().amplitudes)


def test_product_state():
    prod = tensor(ket0(), ket_plus())
    assert prod.dims == (2, 2)
    assert np.allclose(prod.joint.amplitudes, np.array([1, 1, 0, 0]) / np.sqrt(2))
    # a phase-shifted joint vector is accepted
    ProductState(ket0(), ket_plus(), PureState(1j * prod.joint.amplitudes))
    with pytest.raises(InvariantViolation, match="joint"):
        ProductState(ket0(), ket_plus(), tensor(ket1(), ket_plus()).joint)


def test_pbr_basis_orthogonality_pattern():
    """
    Every PBR preparation has exactly one outcome of probability below 1e-12 and
    the forbidden outcomes are all different.
    """
    basis = pbr_entangled_basis()
    assert basis.dim == 4
    labels = [label for label, _ in pbr_preparations()]
    assert labels == ["0,0", "0,+", "+,0", "+,+"]
    table = orthogonality_table(basis, [p.joint for _, p in pbr_preparations()])
    zeros = table < 1e-12
    assert np.all(zeros.sum(axis=1) == 1)
    assert sorted(np.argmax(zeros, axis=1)) == [0, 1, 2, 3]
    assert np.allclose(table.sum(axis=1), 1.0)
    assert np.allclose(np.diag(table), 0.0, atol=1e-12)


def test_ray_equal_resolves_nearby_states():
    """
    States 2e-5 rad apart on the Bloch sphere differ by about 1e-5 in phase-aligned
    norm, far above the tolerance, although 1 − |⟨a|b⟩|² is only about 1e-10.
    """
    a = bloch_state(1.0, 0.3)
    b = bloch_state(1.0 + 2e-5, 0.3)
    assert 1.0 - abs(inner_product(a, b)) ** 2 < 2e-10
    assert not ray_equal(a, b)
    assert not a.ray_equal(b)
    assert ray_equal(a, PureState(np.exp(-2.1j) * a.amplitudes))


def test_born_probabilities_factorize_on_product_basis(make_state, rng):
    for _ in range(50):
        psi, phi = make_state(rng), make_state(rng)
        m1 = qubit_basis(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
        m2 = qubit_basis(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
        product_basis = ProjectiveMeasurement(
            tuple(tensor(u, v).joint for u in m1.basis for v in m2.basis)
        )
        joint = born_probabilities(tensor(psi, phi).joint, product_basis)
        expected = np.outer(born_probabilities(psi, m1), born_probabilities(phi, m2)).ravel()
        assert np.max(np.abs(joint - expected)) < 1e-12


def test_global_phase_leaves_born_probabilities_unchanged(make_state, rng):
    m = qubit_basis(0.8, 2.0)
    for phase in rng.uniform(0, 2 * np.pi, size=20):
        state = make_state(rng)
        shifted = PureState(np.exp(1j * phase) * state.amplitudes)
        diff = born_probabilities(shifted, m) - born_probabilities(state, m)
        assert np.max(np.abs(diff)) < 1e-12


def test_product_state_has_no_weight_on_singlet():
    s = 1 / np.sqrt(2)
    bell = ProjectiveMeasurement.from_vectors(
        [[s, 0, 0, s], [s, 0, 0, -s], [0, s, s, 0], [0, s, -s, 0]]
    )
    probs = born_probabilities(tensor(ket0(), ket0()).joint, bell)
    assert probs[3] < 1e-12
    assert np.allclose(probs, [0.5, 0.5, 0.0, 0.0])
