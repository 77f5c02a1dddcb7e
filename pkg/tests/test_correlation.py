import numpy as np
import pytest
from hypothesis import given, strategies as st

from entangle.bipartite import SubsystemBasis, make_state, partial_scalar_product, product_state, reduced_rho_a, reduced_rho_b
from entangle.correlation import (
    AntilinearOperator,
    apply,
    apply_inverse,
    compose,
    correlated_decomposition,
    correlation_operator,
    correlation_operator_from_basis,
    correlation_operator_from_expansion,
    expansion_coefficient_via_ua,
    generalized_decomposition,
    operator_image,
    operator_preimage,
    state_from_correlation,
)
from entangle.errors import DimensionMismatch
from entangle.samples import random_state, random_unitary, random_vector
from entangle.schmidt import range_projectors, schmidt, subsystem_picture

S2 = 1 / np.sqrt(2)


def _degenerate_4x4(rng):
    u, v = random_unitary(4, rng), random_unitary(4, rng)
    s = np.sqrt(np.array([0.35, 0.35, 0.2, 0.1]))
    return make_state(u @ np.diag(s) @ v.T)


def test_product_state_operator(rng):
    a, b = random_vector(3, rng), random_vector(2, rng)
    u = correlation_operator(product_state(a, b))
    m = u.matrix
    assert np.linalg.matrix_rank(m, tol=1e-10) == 1
    # up to the phase shared by a and conj(b)
    assert np.allclose(apply(u, b), a)


def test_singlet_operator_maps_schmidt_pairs(singlet_state):
    dec = schmidt(singlet_state)
    u = correlation_operator(singlet_state)
    for i in range(2):
        assert np.allclose(apply(u, dec.vectors_b[:, i]), dec.vectors_a[:, i])


def test_weighted_state_operator_is_identity_matrix(weighted_state):
    u = correlation_operator(weighted_state)
    assert np.allclose(u.matrix, np.eye(2))
    # conjugation is visible
    assert np.allclose(apply(u, [1j, 0]), [-1j, 0])


def test_null_space_maps_to_zero(rng):
    state = random_state(3, 4, rng, rank=2)
    _, q_b = range_projectors(state)
    n = (np.eye(4) - q_b) @ random_vector(4, rng)
    assert np.linalg.norm(apply(correlation_operator(state), n)) <= 1e-12


def test_apply_dimension_checks(singlet_state):
    u = correlation_operator(singlet_state)
    with pytest.raises(DimensionMismatch):
        apply(u, [1, 0, 0])
    with pytest.raises(DimensionMismatch):
        apply_inverse(u, [1, 0, 0])
    with pytest.raises(DimensionMismatch):
        operator_image(u, np.eye(3))


def test_inverse_and_range_projector(rng):
    state = random_state(4, 3, rng, rank=2)
    u = correlation_operator(state)
    q_a, q_b = range_projectors(state)
    phi = random_vector(3, rng)
    assert np.allclose(apply_inverse(u, apply(u, phi)), q_b @ phi)
    assert np.allclose(u.matrix @ u.matrix.conj().T, q_a)
    assert np.allclose(u.matrix.conj().T @ u.matrix, q_b.conj())
    assert np.allclose(u.inverse(u(phi)), q_b @ phi)


def test_antiunitarity(rng):
    for _ in range(100):
        state = random_state(3, 4, rng)
        u = correlation_operator(state)
        _, q_b = range_projectors(state)
        phi, psi = q_b @ random_vector(4, rng), q_b @ random_vector(4, rng)
        assert abs(np.vdot(apply(u, phi), apply(u, psi)) - np.conj(np.vdot(phi, psi))) <= 1e-9


def test_compose_gives_linear_map(rng):
    t1 = AntilinearOperator(random_unitary(3, rng))
    t2 = AntilinearOperator(random_unitary(3, rng))
    x = random_vector(3, rng)
    lin = compose(t1, t2)
    assert np.allclose(lin @ x, apply(t1, apply(t2, x)))
    z = 0.3 + 2j
    assert np.allclose(lin @ (z * x), z * (lin @ x))


def test_operator_image_examples(singlet_state, rng):
    u = correlation_operator(singlet_state)
    assert np.allclose(operator_image(u, reduced_rho_b(singlet_state)), np.eye(2) / 2)
    state = random_state(3, 4, rng, rank=2)
    u = correlation_operator(state)
    q_a, _ = range_projectors(state)
    assert np.allclose(operator_image(u, np.eye(4)), q_a)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_density_images_both_ways(dim_a, dim_b, seed):
    rng = np.random.default_rng(seed)
    state = random_state(dim_a, dim_b, rng, rank=int(rng.integers(1, min(dim_a, dim_b) + 1)))
    u = correlation_operator(state)
    rho_a, rho_b = reduced_rho_a(state), reduced_rho_b(state)
    assert np.linalg.norm(operator_image(u, rho_b) - rho_a) <= 1e-9
    assert np.linalg.norm(operator_preimage(u, rho_a) - rho_b) <= 1e-9
    pic = subsystem_picture(state)
    for pa, pb in zip(pic.proj_a, pic.proj_b):
        assert np.linalg.norm(operator_image(u, pb) - pa) <= 1e-9
        assert np.linalg.norm(operator_preimage(u, pa) - pb) <= 1e-9


def test_expansion_coefficient_two_paths(singlet_state, rng):
    u = correlation_operator(singlet_state)
    rho_b = reduced_rho_b(singlet_state)
    assert np.allclose(expansion_coefficient_via_ua(singlet_state, u, rho_b, [0, 1]), [S2, 0])
    state = random_state(3, 4, rng, rank=2)
    u, rho_b = correlation_operator(state), reduced_rho_b(state)
    _, q_b = range_projectors(state)
    n = (np.eye(4) - q_b) @ random_vector(4, rng)
    assert np.linalg.norm(expansion_coefficient_via_ua(state, u, rho_b, n)) <= 1e-9
    for _ in range(50):
        dims = rng.integers(2, 7, size=2)
        state = random_state(*dims, rng)
        u, rho_b = correlation_operator(state), reduced_rho_b(state)
        n = random_vector(dims[1], rng)
        diff = expansion_coefficient_via_ua(state, u, rho_b, n) - partial_scalar_product(n, state)
        assert np.linalg.norm(diff) <= 1e-9


def test_uniqueness_under_remix(singlet_state, rng):
    for state in (singlet_state, _degenerate_4x4(rng)):
        dec = schmidt(state)
        pic = subsystem_picture(state)
        builds = []
        for _ in range(2):
            v = dec.vectors_b.copy()
            for g in pic.groups:
                v[:, list(g)] = v[:, list(g)] @ random_unitary(len(g), rng)
            builds.append(correlation_operator_from_basis(state, v).matrix)
        assert np.linalg.norm(builds[0] - builds[1]) <= 1e-9
        assert np.linalg.norm(builds[0] - correlation_operator(state).matrix) <= 1e-9


def test_from_basis_rejects_null_vector(product00):
    with pytest.raises(ValueError):
        correlation_operator_from_basis(product00, np.array([[0.0], [1.0]]))


def test_expansion_route_agrees(rng):
    for _ in range(20):
        state = random_state(4, 3, rng, rank=int(rng.integers(1, 4)))
        assert np.linalg.norm(correlation_operator_from_expansion(state).matrix - correlation_operator(state).matrix) <= 1e-9


def test_correlated_decomposition(rng):
    state = _degenerate_4x4(rng)
    cd = correlated_decomposition(state)
    assert np.linalg.norm(cd.reassemble() - state.coeff) <= 1e-10
    dec = schmidt(state)
    assert np.allclose(cd.partners(), dec.vectors_a)


def test_generalized_decomposition(singlet_state, weighted_state, product00, rng):
    z = SubsystemBasis.standard("B", 2)
    exp = generalized_decomposition(singlet_state, z)
    assert np.linalg.norm(exp.reassemble() - singlet_state.coeff) <= 1e-10
    x = SubsystemBasis.from_columns("B", np.array([[1, 1], [1, -1]]) * S2)
    exp = generalized_decomposition(weighted_state, x)
    assert np.linalg.norm(exp.reassemble() - weighted_state.coeff) <= 1e-10
    # an x-basis is not an eigenbasis of rho_B here, so the A factors overlap
    assert abs(np.vdot(exp.coefficients[:, 0], exp.coefficients[:, 1])) > 0.1
    basis = SubsystemBasis.from_columns("B", random_unitary(2, rng))
    exp = generalized_decomposition(product00, basis)
    assert np.linalg.matrix_rank(exp.coefficients, tol=1e-10) == 1


def test_state_from_correlation_round_trip(rng):
    state = random_state(3, 4, rng, rank=3)
    again = state_from_correlation(reduced_rho_b(state), correlation_operator(state))
    assert np.linalg.norm(again.coeff - state.coeff) <= 1e-9
