import numpy as np
import pytest
from hypothesis import given, strategies as st

from entangle import oracles
from entangle.bipartite import make_state, on_b, partial_trace_b, reduced_rho_a, reduced_rho_b
from entangle.errors import BadOutcomeIndex, InvalidTwin, NotCommuting, NotNormalized, NotOrthogonal, NotPSD, OutsideRange
from entangle.samples import random_density, random_state, random_unitary, random_vector
from entangle.schmidt import range_projectors, subsystem_picture
from entangle.steering import (
    distant_decomposition_general,
    distant_measurement,
    hadjisavvas_check,
    orthogonal_mixture,
    reachable,
    realize_orthogonal_decomposition,
    selective_distant_measurement,
    steer,
)
from entangle.twins import construct_twin, is_twin_pair

from conftest import up_to_phase

SZ = np.diag([1.0, -1.0])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])
PLUS_X = np.array([1.0, 1.0]) / np.sqrt(2)
MINUS_X = np.array([1.0, -1.0]) / np.sqrt(2)


def test_singlet_selective_measurement(singlet_state):
    pair = is_twin_pair(singlet_state, SZ, SZ)
    records = distant_measurement(singlet_state, pair, mode="selective")
    assert len(records) == 2
    for rec in records:
        assert abs(rec.probability - 0.5) <= 1e-10
        assert rec.residual <= 1e-12
    # outcome with +1 on A and -1 on B: post state |0>|1>
    rec = next(r for r in records if pair.matched[r.outcome].value_a == 1.0)
    assert up_to_phase(rec.post_state.vector, np.kron([1, 0], [0, 1])) <= 1e-12


def test_singlet_nonselective(singlet_state):
    pair = is_twin_pair(singlet_state, SZ, SZ)
    changed = distant_measurement(singlet_state, pair)
    assert np.linalg.norm(changed - np.eye(2) / 2) <= 1e-10


def test_weighted_selective(weighted_state):
    pair = is_twin_pair(weighted_state, SZ, SZ)
    m = next(k for k, mt in enumerate(pair.matched) if mt.value_b == 1.0)
    rec = selective_distant_measurement(weighted_state, pair, m)
    assert np.isclose(rec.probability, 0.7)
    assert up_to_phase(rec.post_state.vector, np.kron([1, 0], [1, 0])) <= 1e-12
    assert np.allclose(rec.post_rho_a, np.diag([1.0, 0.0]))


def test_measurement_errors(weighted_state, singlet_state):
    bad = is_twin_pair(weighted_state, SZ, SX)
    with pytest.raises(InvalidTwin):
        distant_measurement(weighted_state, bad)
    with pytest.raises(InvalidTwin):
        orthogonal_mixture(weighted_state, bad)
    good = is_twin_pair(singlet_state, SZ, SZ)
    with pytest.raises(BadOutcomeIndex):
        distant_measurement(singlet_state, good, mode="selective", outcome=2)
    with pytest.raises(ValueError):
        distant_measurement(singlet_state, good, mode="sometimes")


def test_nonselective_identity_random(rng):
    for _ in range(30):
        state = random_state(3, 3, rng)
        o_b = reduced_rho_b(state)
        pair = is_twin_pair(state, construct_twin(state, o_b), o_b)
        rho_a = reduced_rho_a(state)
        assert np.linalg.norm(distant_measurement(state, pair) - rho_a) <= 1e-9
        assert np.linalg.norm(orthogonal_mixture(state, pair).mixture() - rho_a) <= 1e-9


def test_realize_orthogonal_decomposition_singlet(singlet_state):
    projectors = [np.outer(PLUS_X, PLUS_X), np.outer(MINUS_X, MINUS_X)]
    o_b = realize_orthogonal_decomposition(singlet_state, projectors)
    o_a = construct_twin(singlet_state, o_b)
    pair = is_twin_pair(singlet_state, o_a, o_b)
    assert pair.ok
    got = sorted((m.proj_a for m in pair.matched), key=lambda p: p[0, 1].real)
    want = sorted(projectors, key=lambda p: p[0, 1].real)
    for g, w in zip(got, want):
        assert np.allclose(g, w)
    # the B side measures x as well
    for m in pair.matched:
        assert min(np.linalg.norm(m.proj_b - p) for p in projectors) <= 1e-9
    mix = orthogonal_mixture(singlet_state, pair)
    assert np.allclose(mix.weights, [0.5, 0.5])


def test_realize_from_spectral_projectors(rng):
    state = random_state(3, 3, rng)
    pic = subsystem_picture(state)
    o_b = realize_orthogonal_decomposition(state, list(pic.proj_a), values=np.arange(1.0, len(pic) + 1))
    # the result is a function of rho_B: it commutes and shares its eigenprojectors
    rho_b = reduced_rho_b(state)
    assert np.linalg.norm(o_b.matrix @ rho_b - rho_b @ o_b.matrix) <= 1e-9
    for q in pic.proj_b:
        assert min(np.linalg.norm(p - q) for p in o_b.projectors) <= 1e-9


def test_realize_single_projector(singlet_state):
    o_b = realize_orthogonal_decomposition(singlet_state, [np.eye(2)])
    assert len(o_b.projectors) == 1


def test_realize_errors(weighted_state, rng):
    with pytest.raises(NotOrthogonal):
        realize_orthogonal_decomposition(weighted_state, [np.diag([1.0, 0.0]), np.diag([1.0, 0.0])])
    with pytest.raises(NotCommuting):
        realize_orthogonal_decomposition(weighted_state, [np.outer(PLUS_X, PLUS_X)])
    state = random_state(3, 3, rng, rank=2)
    q_a, _ = range_projectors(state)
    outside = np.eye(3) - q_a
    with pytest.raises(OutsideRange):
        realize_orthogonal_decomposition(state, [outside])


def test_general_decomposition_sigma_x(weighted_state):
    dec = distant_decomposition_general(weighted_state, SX)
    assert np.allclose(dec.weights, [0.5, 0.5])
    assert np.linalg.norm(dec.mixture() - np.diag([0.7, 0.3])) <= 1e-9
    t0, t1 = dec.term_states
    for t in dec.term_states:
        assert np.isclose(np.trace(t @ t).real, 1.0)
    overlap = np.trace(t0 @ t1).real
    assert 1e-3 < overlap < 1 - 1e-3
    # brute force: trace B out of the collapsed composite dyad
    psi = weighted_state.vector
    for k, p in enumerate([np.outer(MINUS_X, MINUS_X), np.outer(PLUS_X, PLUS_X)]):
        v = on_b(2, p) @ psi
        rho = partial_trace_b(np.outer(v, v.conj()), (2, 2))
        assert np.allclose(dec.weights[k] * dec.term_states[k], rho)


def test_general_decomposition_reduces_to_twin(rng):
    state = random_state(3, 3, rng)
    o_b = reduced_rho_b(state)
    pair = is_twin_pair(state, construct_twin(state, o_b), o_b)
    general = distant_decomposition_general(state, o_b)
    ortho = orthogonal_mixture(state, pair)
    assert np.allclose(np.sort(general.weights), np.sort(ortho.weights))


def test_general_decomposition_drops_null_terms(product00):
    dec = distant_decomposition_general(product00, SZ)
    assert len(dec.weights) == 1 and dec.outcomes == (1,)


def test_steer_examples(singlet_state, weighted_state):
    res = steer(singlet_state, PLUS_X)
    assert np.isclose(res.probability, 0.5)
    prob, target = oracles.steering_collapse(singlet_state.vector, (2, 2), PLUS_X)
    assert up_to_phase(res.target_a, target) <= 1e-9
    assert up_to_phase(res.target_a, MINUS_X) <= 1e-9
    res = steer(weighted_state, PLUS_X)
    assert abs(res.probability - 0.5) <= 1e-10
    assert np.allclose(res.target_a, [np.sqrt(0.7), np.sqrt(0.3)])


def test_steer_null_space(rng):
    state = random_state(3, 4, rng, rank=2)
    _, q_b = range_projectors(state)
    n = (np.eye(4) - q_b) @ random_vector(4, rng)
    res = steer(state, n / np.linalg.norm(n))
    assert res.probability == 0.0 and res.target_a is None


def test_steer_requires_unit_vector(singlet_state):
    with pytest.raises(NotNormalized):
        steer(singlet_state, [1.0, 1.0])


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_steering_matches_collapse(dim_a, dim_b, seed):
    rng = np.random.default_rng(seed)
    state = random_state(dim_a, dim_b, rng, rank=int(rng.integers(1, min(dim_a, dim_b) + 1)))
    n = random_vector(dim_b, rng)
    res = steer(state, n)
    prob, target = oracles.steering_collapse(state.vector, state.dims, n)
    assert abs(res.probability - prob) <= 1e-9
    if prob > 1e-9:
        assert up_to_phase(res.target_a, target) <= 1e-9
    assert max(res.residuals.values()) <= 1e-9


def test_probabilities_complete(rng):
    for _ in range(20):
        state = random_state(3, 4, rng)
        basis = random_unitary(4, rng)
        assert abs(sum(steer(state, basis[:, k]).probability for k in range(4)) - 1.0) <= 1e-9


def test_same_range_part_same_outcome(rng):
    state = random_state(3, 4, rng, rank=2)
    _, q_b = range_projectors(state)
    n = q_b @ random_vector(4, rng)
    n /= np.linalg.norm(n)
    extra = (np.eye(4) - q_b) @ random_vector(4, rng)
    n2 = np.exp(0.7j) * (n + 0.5 * extra / np.linalg.norm(extra))
    n2 /= np.linalg.norm(n2)
    r1, r2 = steer(state, n), steer(state, n2)
    assert up_to_phase(r1.target_a, r2.target_a) <= 1e-9
    # probability scales with the squared range weight
    assert np.isclose(r2.probability, r1.probability * r2.range_weight**2)


def test_probability_grows_with_range_weight(rng):
    state = random_state(3, 4, rng, rank=2)
    _, q_b = range_projectors(state)
    inside = q_b @ random_vector(4, rng)
    inside /= np.linalg.norm(inside)
    out = (np.eye(4) - q_b) @ random_vector(4, rng)
    out /= np.linalg.norm(out)
    probs = [steer(state, np.cos(t) * inside + np.sin(t) * out).probability for t in np.linspace(1.5, 0.0, 6)]
    assert np.all(np.diff(probs) > 0)


def test_erasure_restores_coherence():
    # path (x) polarization: |0>|H> + |1>|V>; the 45 degree analyzer erases which-path data
    state = make_state(np.eye(2) / np.sqrt(2))
    res = steer(state, PLUS_X)
    rho = np.outer(res.target_a, res.target_a.conj())
    assert np.isclose(abs(rho[0, 1]), 0.5)


def test_reachability_examples(singlet_state, product00, weighted_state, rng):
    for _ in range(10):
        assert reachable(singlet_state, random_vector(2, rng)).reachable
    assert reachable(product00, [1.0, 0.0]).reachable
    assert not reachable(product00, PLUS_X).reachable
    r = reachable(weighted_state, PLUS_X)
    assert r.reachable and r.roundtrip_overlap >= 1 - 1e-9
    # p = 1 / <phi| rho_A^-1 |phi>
    assert np.isclose(r.probability, 1.0 / (0.5 / 0.7 + 0.5 / 0.3))
    res = steer(weighted_state, r.n_bar)
    assert up_to_phase(res.target_a, PLUS_X) <= 1e-9


def test_reachability_round_trip(rng):
    for _ in range(100):
        dims = rng.integers(1, 6, size=2)
        state = random_state(*dims, rng, rank=int(rng.integers(1, dims.min() + 1)))
        q_a, _ = range_projectors(state)
        phi = q_a @ random_vector(dims[0], rng)
        phi /= np.linalg.norm(phi)
        r = reachable(state, phi)
        assert r.reachable
        assert up_to_phase(steer(state, r.n_bar).target_a, phi) <= 1e-9


def test_reachability_requires_unit(singlet_state):
    with pytest.raises(NotNormalized):
        reachable(singlet_state, [2.0, 0.0])


def test_hadjisavvas_examples(rng):
    for _ in range(5):
        phi = random_vector(2, rng)
        w = hadjisavvas_check(np.eye(2) / 2, phi)
        assert w.member and abs(w.weight - 0.5) <= 1e-6
    assert not hadjisavvas_check(np.diag([1.0, 0.0]), [0.0, 1.0]).member
    w = hadjisavvas_check(np.diag([0.7, 0.3]), PLUS_X)
    assert w.member
    assert abs(w.weight - oracles.largest_pure_weight(np.diag([0.7, 0.3]), PLUS_X)) <= 1e-6
    assert np.isclose(np.trace(w.remainder).real, 1.0)
    assert np.linalg.eigvalsh(w.remainder).min() >= -1e-6
    with pytest.raises(NotPSD):
        hadjisavvas_check(np.diag([1.2, -0.2]), [1.0, 0.0])


def test_hadjisavvas_matches_closed_form(rng):
    for _ in range(20):
        rho = random_density(3, rng, rank=2)
        q = np.linalg.pinv(rho) @ rho
        phi = q @ random_vector(3, rng)
        phi /= np.linalg.norm(phi)
        w = hadjisavvas_check(rho, phi)
        assert w.member
        assert abs(w.weight - oracles.largest_pure_weight(rho, phi)) <= 1e-6


def test_hadjisavvas_pure_state():
    w = hadjisavvas_check(np.diag([1.0, 0.0]), [1.0, 0.0])
    assert w.member and w.weight == 1.0 and w.remainder is None
