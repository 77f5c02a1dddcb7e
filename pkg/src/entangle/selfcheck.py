"""Randomized property suites covering every module.

Each suite draws one random instance per trial and returns the largest
residual among the identities it checks. A suite passes when the maximum over
all trials stays within its threshold. Boolean properties contribute 0 when
they hold and ``inf`` when they fail.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import oracles
from .bipartite import (
    BipartiteState,
    SubsystemBasis,
    expand_in_basis,
    on_a,
    on_b,
    partial_scalar_product,
    partial_trace_a,
    partial_trace_b,
    purify,
    reduced_rho_a,
    reduced_rho_b,
)
from .correlation import (
    apply,
    correlation_operator,
    correlation_operator_from_basis,
    correlation_operator_from_expansion,
    expansion_coefficient_via_ua,
    operator_image,
    operator_preimage,
)
from .numeric import DEFAULT_TOL, TolerancePolicy, norm, psd_sqrt, spectral_decomposition, svd
from .samples import as_rng, random_density, random_hermitian, random_operator, random_state, random_unitary, random_vector
from .schmidt import range_projectors, reconstruct, schmidt, subsystem_picture_from
from .steering import distant_measurement, orthogonal_mixture, reachable, steer
from .twins import construct_twin, is_twin_pair, lueders_change, twin_commutators

FAIL = float("inf")


def _flag(ok: bool) -> float:
    return 0.0 if ok else FAIL


def _random_rank(rng, dim_a, dim_b) -> int:
    return int(rng.integers(1, min(dim_a, dim_b) + 1))


def _degenerate_state(rng, dim_a, dim_b) -> BipartiteState:
    """Random state whose Schmidt spectrum has at least one repeated value."""
    k = min(dim_a, dim_b)
    s = rng.uniform(0.2, 1.0, size=k)
    if k >= 2:
        s[1] = s[0]
    s = s / np.linalg.norm(s)
    u, v = random_unitary(dim_a, rng), random_unitary(dim_b, rng)
    return BipartiteState(u[:, :k] @ np.diag(s) @ v[:, :k].T)


def _state(rng, dim_a, dim_b) -> BipartiteState:
    # mix full-rank, rank-deficient and degenerate instances
    kind = rng.integers(3)
    if kind == 0:
        return random_state(dim_a, dim_b, rng)
    if kind == 1:
        return random_state(dim_a, dim_b, rng, rank=_random_rank(rng, dim_a, dim_b))
    return _degenerate_state(rng, dim_a, dim_b)


def check_numeric_core(rng, dim_a, dim_b, tol) -> float:
    h = random_hermitian(dim_a, rng)
    spec = spectral_decomposition(h, tol)
    rho = random_density(dim_b, rng, rank=_random_rank(rng, dim_b, dim_b))
    root = psd_sqrt(rho, tol)
    c = random_state(dim_a, dim_b, rng, rank=_random_rank(rng, dim_a, dim_b)).coeff
    left, s, right = svd(c, tol)
    return max(
        norm(spec.matrix() - h),
        norm(sum(spec.projectors) - np.eye(dim_a)),
        norm(root @ root - rho),
        norm(left @ np.diag(s) @ right.conj().T - c),
    )


def check_partial_trace_rules(rng, dim_a, dim_b, tol) -> float:
    dims = (dim_a, dim_b)
    o_a, o_b = random_operator(dim_a, rng), random_operator(dim_b, rng)
    o_ab = random_operator(dim_a * dim_b, rng)
    big_a, big_b = on_a(o_a, dim_b), on_b(dim_a, o_b)
    tr_a, tr_b = partial_trace_a(o_ab, dims), partial_trace_b(o_ab, dims)
    return max(
        norm(tr_b - oracles.partial_trace_b(o_ab, dims)),
        norm(tr_a - oracles.partial_trace_a(o_ab, dims)),
        abs(np.trace(tr_b) - np.trace(o_ab)),
        # cyclic under the trace of the traced-out factor
        norm(partial_trace_a(big_a @ o_ab, dims) - partial_trace_a(o_ab @ big_a, dims)),
        norm(partial_trace_b(big_b @ o_ab, dims) - partial_trace_b(o_ab @ big_b, dims)),
        # operators on the kept factor come out of the trace, order preserved
        norm(partial_trace_b(big_a @ o_ab, dims) - o_a @ tr_b),
        norm(partial_trace_b(o_ab @ big_a, dims) - tr_b @ o_a),
        norm(partial_trace_a(big_b @ o_ab, dims) - o_b @ tr_a),
        norm(partial_trace_a(o_ab @ big_b, dims) - tr_a @ o_b),
    )


def check_partial_scalar_product(rng, dim_a, dim_b, tol) -> float:
    state = random_state(dim_a, dim_b, rng)
    psi = state.vector
    phi = random_vector(dim_b, rng) * rng.uniform(0.5, 2.0)
    fast = partial_scalar_product(phi, state)
    # orthogonal split of the state for extended linearity
    q = random_unitary(dim_a, rng)
    cut = int(rng.integers(0, dim_a + 1))
    low = q[:, :cut] @ q[:, :cut].conj().T
    part1, part2 = BipartiteState(low @ state.coeff), BipartiteState(state.coeff - low @ state.coeff)
    dyad = np.outer(psi, psi.conj())
    bridge = partial_trace_b(on_b(dim_a, np.outer(phi, phi.conj())) @ dyad, state.dims)
    return max(
        norm(fast - oracles.psp_via_a_basis(phi, psi, state.dims, random_unitary(dim_a, rng))),
        norm(fast - oracles.psp_via_b_representation(phi, psi, state.dims, random_unitary(dim_b, rng))),
        norm(fast - oracles.psp_via_product_terms(phi, state.coeff)),
        norm(fast - partial_scalar_product(phi, part1) - partial_scalar_product(phi, part2)),
        norm(bridge - np.outer(fast, fast.conj())),
        abs(np.trace(bridge) - norm(fast) ** 2),
    )


def check_expansion(rng, dim_a, dim_b, tol) -> float:
    state = _state(rng, dim_a, dim_b)
    basis = SubsystemBasis.from_columns("B", random_unitary(dim_b, rng))
    exp = expand_in_basis(state, basis)
    gram = exp.coefficients.conj().T @ exp.coefficients
    rho_b = reduced_rho_b(state)
    # <bar n | bar n'> = <n'| rho_B |n>
    from_rho = basis.vectors.T @ rho_b.T @ basis.vectors.conj()
    return max(
        abs(np.sum(exp.norms() ** 2) - 1.0),
        norm(exp.reassemble() - state.coeff),
        norm(gram - from_rho),
    )


def check_reduced_densities(rng, dim_a, dim_b, tol) -> float:
    state = _state(rng, dim_a, dim_b)
    dyad = state.density()
    rho_a, rho_b = reduced_rho_a(state), reduced_rho_b(state)
    ev_a = np.sort(np.linalg.eigvalsh(rho_a))[::-1]
    ev_b = np.sort(np.linalg.eigvalsh(rho_b))[::-1]
    k = min(dim_a, dim_b)
    tail = max(np.abs(ev_a[k:]).max(initial=0.0), np.abs(ev_b[k:]).max(initial=0.0))
    return max(
        norm(rho_a - oracles.partial_trace_b(dyad, state.dims)),
        norm(rho_b - oracles.partial_trace_a(dyad, state.dims)),
        np.abs(ev_a[:k] - ev_b[:k]).max(),
        tail,
        abs(np.trace(rho_a) - 1.0),
    )


def check_schmidt(rng, dim_a, dim_b, tol) -> float:
    state = _state(rng, dim_a, dim_b)
    dec = schmidt(state, tol)
    picture = subsystem_picture_from(dec, tol)
    q_a, q_b = range_projectors(state, tol)
    rho_a, rho_b = reduced_rho_a(state), reduced_rho_b(state)
    eig_basis = SubsystemBasis.from_columns("B", _complete(dec.vectors_b, rng))
    exp = expand_in_basis(state, eig_basis)
    gram = exp.coefficients.conj().T @ exp.coefficients
    off_diag = gram - np.diag(np.diag(gram))
    dyads = sum(np.outer(c, c.conj()) for c in exp.coefficients.T)
    rank = int(np.sum(np.linalg.svd(state.coeff, compute_uv=False) > tol.eps_rank))
    return max(
        norm(reconstruct(dec, state.dims).coeff - state.coeff),
        norm(dec.vectors_a.conj().T @ dec.vectors_a - np.eye(dec.rank)),
        norm(dec.vectors_b.conj().T @ dec.vectors_b - np.eye(dec.rank)),
        norm(rho_b @ dec.vectors_b - dec.vectors_b * dec.probabilities),
        norm(picture.rho_a() - rho_a),
        norm(picture.rho_b() - rho_b),
        norm(q_a @ state.coeff @ q_b.T - state.coeff),
        norm(off_diag),
        norm(dyads - rho_a),
        _flag(rank == dec.rank),
        _flag(dec.rank >= 2 or np.linalg.matrix_rank(rho_b, tol=tol.eps_rank) <= 1),
    )


def _complete(vectors, rng) -> np.ndarray:
    """Extend orthonormal columns to a full unitary."""
    dim, k = vectors.shape
    if k == dim:
        return vectors
    rest = random_operator(dim, rng)[:, : dim - k]
    rest = rest - vectors @ (vectors.conj().T @ rest)
    q, _ = np.linalg.qr(rest)
    return np.hstack([vectors, q])


def check_correlation(rng, dim_a, dim_b, tol) -> float:
    state = _state(rng, dim_a, dim_b)
    dec = schmidt(state, tol)
    u = correlation_operator(state, tol)
    rho_a, rho_b = reduced_rho_a(state), reduced_rho_b(state)
    q_a, q_b = range_projectors(state, tol)
    picture = subsystem_picture_from(dec, tol)
    # range vectors for antiunitarity
    phi, psi = q_b @ random_vector(dim_b, rng), q_b @ random_vector(dim_b, rng)
    n_b = random_vector(dim_b, rng)
    # remix inside every degenerate block
    remixed = dec.vectors_b.copy()
    for g in picture.groups:
        remixed[:, list(g)] = remixed[:, list(g)] @ random_unitary(len(g), rng)
    residuals = [
        norm(expansion_coefficient_via_ua(state, u, rho_b, n_b, tol) - partial_scalar_product(n_b, state)),
        abs(np.vdot(apply(u, phi), apply(u, psi)) - np.conj(np.vdot(phi, psi))),
        norm(correlation_operator_from_basis(state, remixed, tol).matrix - u.matrix),
        norm(correlation_operator_from_expansion(state, tol).matrix - u.matrix),
        norm(operator_image(u, rho_b) - rho_a),
        norm(operator_preimage(u, rho_a) - rho_b),
        norm(u.matrix @ u.matrix.conj().T - q_a),
    ]
    for pa, pb in zip(picture.proj_a, picture.proj_b):
        residuals.append(norm(operator_image(u, pb) - pa))
        residuals.append(norm(operator_preimage(u, pa) - pb))
    return max(residuals)


def _commuting_observable(rng, state, tol) -> np.ndarray:
    """Random ``O_B`` diagonal in an eigenbasis of ``rho_B``, with repeated values."""
    dec = schmidt(state, tol)
    picture = subsystem_picture_from(dec, tol)
    dim_b = state.dim_b
    frame = dec.vectors_b.copy()
    for g in picture.groups:
        frame[:, list(g)] = frame[:, list(g)] @ random_unitary(len(g), rng)
    frame = _complete(frame, rng)
    values = rng.integers(-2, 3, size=dim_b).astype(float)
    return frame @ np.diag(values) @ frame.conj().T


def check_twins(rng, dim_a, dim_b, tol) -> float:
    state = _state(rng, dim_a, dim_b)
    o_b = _commuting_observable(rng, state, tol)
    o_a = construct_twin(state, o_b, tol=tol)
    pair = is_twin_pair(state, o_a, o_b, tol)
    if not pair.ok:
        return FAIL
    psi = state.vector
    residuals = [pair.max_residual, twin_commutators(state, pair)]
    for m in pair.matched:
        p_a = np.vdot(psi, on_a(m.proj_a, dim_b) @ psi).real
        p_b = np.vdot(psi, on_b(dim_a, m.proj_b) @ psi).real
        residuals.append(abs(p_a - p_b))
    change_a = lueders_change(state, [m.proj_a for m in pair.matched], "A")
    change_b = lueders_change(state, [m.proj_b for m in pair.matched], "B")
    residuals.append(norm(change_a - change_b))
    # the reduced densities are always twins of each other
    rho_pair = is_twin_pair(state, reduced_rho_a(state), reduced_rho_b(state), tol)
    residuals.append(_flag(rho_pair.ok))
    return max(residuals)


def check_distant_measurement(rng, dim_a, dim_b, tol) -> float:
    state = _state(rng, dim_a, dim_b)
    o_b = _commuting_observable(rng, state, tol)
    pair = is_twin_pair(state, construct_twin(state, o_b, tol=tol), o_b, tol)
    rho_a = reduced_rho_a(state)
    changed = distant_measurement(state, pair, tol=tol)
    records = distant_measurement(state, pair, mode="selective", tol=tol)
    mixture = orthogonal_mixture(state, pair)
    return max(
        norm(changed - rho_a),
        abs(sum(r.probability for r in records) - 1.0),
        max(r.residual for r in records),
        norm(mixture.mixture() - rho_a),
    )


def check_steering(rng, dim_a, dim_b, tol) -> float:
    state = _state(rng, dim_a, dim_b)
    n_bar = random_vector(dim_b, rng)
    result = steer(state, n_bar, tol)
    prob, target = oracles.steering_collapse(state.vector, state.dims, n_bar)
    residuals = [abs(result.probability - prob), *result.residuals.values()]
    if target is not None and prob > tol.eps_check:
        residuals.append(1.0 - abs(np.vdot(result.target_a, target)))
    basis = random_unitary(dim_b, rng)
    total = sum(steer(state, basis[:, k], tol).probability for k in range(dim_b))
    residuals.append(abs(total - 1.0))
    return max(residuals)


def check_reachability(rng, dim_a, dim_b, tol) -> float:
    state = _state(rng, dim_a, dim_b)
    q_a, _ = range_projectors(state, tol)
    phi = q_a @ random_vector(dim_a, rng)
    phi = phi / norm(phi)
    reach = reachable(state, phi, tol)
    if not reach.reachable:
        return FAIL
    residuals = [1.0 - reach.roundtrip_overlap]
    if np.trace(q_a).real < dim_a - 0.5:
        outside = (np.eye(dim_a) - q_a) @ random_vector(dim_a, rng)
        mixed = phi + outside / norm(outside)
        residuals.append(_flag(not reachable(state, mixed / norm(mixed), tol).reachable))
    return max(residuals)


def check_purification(rng, dim_a, dim_b, tol) -> float:
    rank = _random_rank(rng, dim_a, dim_b)
    rho = random_density(dim_a, rng, rank=rank)
    state = purify(rho, dim_b, tol)
    return max(norm(reduced_rho_a(state) - rho), abs(norm(state.coeff) - 1.0))


Suite = Callable[[np.random.Generator, int, int, TolerancePolicy], float]

SUITES: tuple[tuple[str, Suite], ...] = (
    ("numeric_core", check_numeric_core),
    ("partial_trace_rules", check_partial_trace_rules),
    ("partial_scalar_product", check_partial_scalar_product),
    ("basis_expansion", check_expansion),
    ("reduced_densities", check_reduced_densities),
    ("schmidt", check_schmidt),
    ("correlation_operator", check_correlation),
    ("twins", check_twins),
    ("distant_measurement", check_distant_measurement),
    ("steering", check_steering),
    ("reachability", check_reachability),
    ("purification", check_purification),
)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    dims: tuple[int, int]
    trials: int
    max_residual: float
    threshold: float
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and self.max_residual <= self.threshold


def run_suite(name: str, fn: Suite, dims, trials: int, rng, tol: TolerancePolicy) -> SuiteResult:
    worst = 0.0
    try:
        for _ in range(trials):
            worst = max(worst, float(fn(rng, dims[0], dims[1], tol)))
    except Exception as exc:  # reported as a failed suite, not a crash
        return SuiteResult(name, tuple(dims), trials, FAIL, tol.eps_check, f"{type(exc).__name__}: {exc}")
    return SuiteResult(name, tuple(dims), trials, worst, tol.eps_check)


def run_selfcheck(dims_list, trials: int = 100, seed: int | None = 0, tol: TolerancePolicy = DEFAULT_TOL, suites=SUITES):
    """Run every suite on every dimension pair; returns ``(results, seconds)``.

    Each (dims, suite) combination gets its own generator spawned from ``seed``
    so results do not depend on suite order.
    """
    start = time.perf_counter()
    root = np.random.SeedSequence(seed)
    children = iter(root.spawn(len(dims_list) * len(suites)))
    results = []
    for dims in dims_list:
        if min(dims) < 1:
            raise ValueError(f"dimensions must be positive, got {dims}")
        for name, fn in suites:
            results.append(run_suite(name, fn, dims, trials, as_rng(next(children)), tol))
    return results, time.perf_counter() - start
