"""Distant measurement, distant state decompositions and steering.

Only finite dimensions are handled, so ``range(rho) = range(rho^(1/2))`` and
every state in the range of ``rho_A`` can be steered into exactly. States
that can only be approached in a limit do not arise here.

Whether a non-orthogonal decomposition of ``rho_A`` can always be produced by
measuring some nearby observable is left open; only the orthogonal case
(``realize_orthogonal_decomposition``) and the forward direction
(``distant_decomposition_general``) are provided.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bipartite import BipartiteState, make_state, reduced_rho_a, reduced_rho_b
from .correlation import apply, apply_inverse, correlation_operator_from_schmidt, operator_preimage
from .errors import BadOutcomeIndex, InvalidTwin, NotCommuting, NotNormalized, NotOrthogonal, OutsideRange
from .numeric import (
    DEFAULT_TOL,
    TolerancePolicy,
    as_vector,
    check_hermitian,
    commutator,
    norm,
    pinv_sqrt,
    psd_sqrt,
    range_projector,
)
from .schmidt import schmidt, subsystem_picture_from
from .twins import Observable, TwinPair, as_observable, observable_on_range


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    outcome: int
    probability: float
    post_state: BipartiteState
    post_rho_a: np.ndarray
    residual: float
    """Distance between the A-side and B-side collapsed states."""


def _check_twin(pair: TwinPair):
    if not pair.ok:
        raise InvalidTwin("observables are not twins in this state")


def selective_distant_measurement(state: BipartiteState, pair: TwinPair, outcome: int) -> MeasurementRecord:
    """Select result ``outcome`` (an index into ``pair.matched``) of the nearby twin."""
    _check_twin(pair)
    if not 0 <= outcome < len(pair.matched):
        raise BadOutcomeIndex(f"outcome {outcome} not in 0..{len(pair.matched) - 1}")
    match = pair.matched[outcome]
    via_b = state.coeff @ match.proj_b.T
    via_a = match.proj_a @ state.coeff
    prob = norm(via_b) ** 2
    post = make_state(via_b)
    return MeasurementRecord(outcome, prob, post, reduced_rho_a(post), norm(via_a / norm(via_a) - post.coeff))


def distant_measurement(state: BipartiteState, pair: TwinPair, mode: str = "nonselective", outcome: int | None = None, tol: TolerancePolicy = DEFAULT_TOL):
    """Distant measurement induced by measuring the B twin.

    ``mode="selective"`` returns a list of :class:`MeasurementRecord`, one per
    outcome (or only ``outcome`` when given). ``mode="nonselective"`` returns
    the changed distant state ``sum_m P_A^m rho_A P_A^m``, which is checked to
    coincide with ``rho_A``.
    """
    _check_twin(pair)
    if mode == "selective":
        outcomes = range(len(pair.matched)) if outcome is None else [outcome]
        return [selective_distant_measurement(state, pair, m) for m in outcomes]
    if mode != "nonselective":
        raise ValueError(f"mode must be 'selective' or 'nonselective', got {mode!r}")
    rho_a = reduced_rho_a(state)
    changed = sum(m.proj_a @ rho_a @ m.proj_a for m in pair.matched)
    if norm(changed - rho_a) > tol.eps_check:
        raise InvalidTwin(f"non-selective distant measurement changed rho_A by {norm(changed - rho_a):.3e}")
    return changed


@dataclass(frozen=True, eq=False)
class DistantDecomposition:
    weights: np.ndarray
    term_states: tuple[np.ndarray, ...]
    outcomes: tuple[int, ...] = ()

    def mixture(self) -> np.ndarray:
        return sum(w * t for w, t in zip(self.weights, self.term_states))


def orthogonal_mixture(state: BipartiteState, pair: TwinPair) -> DistantDecomposition:
    """``rho_A`` as the orthogonal mixture selected by the twin projectors."""
    _check_twin(pair)
    rho_a, rho_b = reduced_rho_a(state), reduced_rho_b(state)
    weights, terms = [], []
    for m in pair.matched:
        weights.append(np.trace(rho_b @ m.proj_b).real)
        terms.append(m.proj_a @ rho_a @ m.proj_a / np.trace(rho_a @ m.proj_a).real)
    return DistantDecomposition(np.array(weights), tuple(terms), tuple(range(len(weights))))


def distant_decomposition_general(state: BipartiteState, o_b, tol: TolerancePolicy = DEFAULT_TOL) -> DistantDecomposition:
    """Decomposition of ``rho_A`` induced by measuring any B observable.

    Terms whose weight is at most ``eps_check`` are dropped.
    """
    o_b = as_observable(o_b, tol)
    weights, terms, outcomes = [], [], []
    for k, p in enumerate(o_b.projectors):
        collapsed = state.coeff @ p.T
        w = norm(collapsed) ** 2
        if w <= tol.eps_check:
            continue
        weights.append(w)
        terms.append(collapsed @ collapsed.conj().T / w)
        outcomes.append(k)
    return DistantDecomposition(np.array(weights), tuple(terms), tuple(outcomes))


def realize_orthogonal_decomposition(state: BipartiteState, projectors, values=None, tol: TolerancePolicy = DEFAULT_TOL) -> Observable:
    """Find a B observable whose measurement splits ``rho_A`` along ``projectors``.

    The A-side projectors must be mutually orthogonal, lie inside the range of
    ``rho_A`` and commute with it. The returned observable is the minimal twin
    of ``O_A = sum_m values[m] projectors[m]`` (default values ``1, 2, ...``).
    """
    projectors = [check_hermitian(p, tol, "projector") for p in projectors]
    rho_a = reduced_rho_a(state)
    dec = schmidt(state, tol)
    q_a = dec.vectors_a @ dec.vectors_a.conj().T
    for k, p in enumerate(projectors):
        for l in range(k + 1, len(projectors)):
            overlap = norm(p @ projectors[l])
            if overlap > tol.eps_check:
                raise NotOrthogonal(f"projectors {k} and {l} overlap ({overlap:.3e})")
        if norm(q_a @ p - p) > tol.eps_check:
            raise OutsideRange(f"projector {k} reaches outside the range of rho_A")
        if norm(commutator(p, rho_a)) > tol.eps_check:
            raise NotCommuting(f"projector {k} does not commute with rho_A")
    # roles of A and B swap: pull each projector back through U
    u = correlation_operator_from_schmidt(dec)
    pulled = [operator_preimage(u, p) for p in projectors]
    q_b = dec.vectors_b @ dec.vectors_b.conj().T
    return observable_on_range(pulled, values, q_b)


@dataclass(frozen=True, eq=False)
class SteeringResult:
    """Distant state produced by selecting ``|n_bar><n_bar|`` on B.

    ``target_a`` and ``range_part`` are ``None`` when ``n_bar`` has no
    component in the range of ``rho_B`` (probability 0). ``residuals`` holds
    the self-checks performed: the two forms of the probability and, when
    ``n_bar`` lies in the range, the eigenvalue-weighted form.
    """

    probability: float
    target_a: np.ndarray | None
    range_part: np.ndarray | None
    range_weight: float
    residuals: dict = field(default_factory=dict)


def _check_unit(v, tol, name) -> np.ndarray:
    v = as_vector(v, name)
    if abs(norm(v) - 1.0) > tol.eps_check:
        raise NotNormalized(f"{name} has norm {norm(v)!r}")
    return v


def steer(state: BipartiteState, n_bar, tol: TolerancePolicy = DEFAULT_TOL) -> SteeringResult:
    """Steer A by selecting the nearby pure state ``n_bar``.

    The target is ``U rho_B^(1/2) n_bar`` normalized, reached with probability
    ``||rho_B^(1/2) n_bar||^2``.
    """
    n_bar = _check_unit(n_bar, tol, "n_bar")
    dec = schmidt(state, tol)
    picture = subsystem_picture_from(dec, tol)
    u = correlation_operator_from_schmidt(dec)
    rho_b = reduced_rho_b(state)
    q_b = dec.vectors_b @ dec.vectors_b.conj().T
    projected = q_b @ n_bar
    weight = norm(projected)
    if weight <= tol.eps_check:
        return SteeringResult(0.0, None, None, weight, {})
    root = psd_sqrt(rho_b, tol)
    lifted = root @ n_bar
    prob = norm(lifted) ** 2
    range_part = projected / weight
    prob_range = weight**2 * norm(root @ range_part) ** 2
    prob_blocks = weight**2 * sum(r * norm(q @ range_part) ** 2 for r, q in zip(picture.distinct_r, picture.proj_b))
    residuals = {
        "probability_range_form": float(abs(prob - prob_range)),
        "probability_eigen_form": float(abs(prob - prob_blocks)),
    }
    target = apply(u, lifted)
    target = target / norm(target)
    via_range = apply(u, root @ range_part)
    residuals["target_range_form"] = norm(target - via_range / norm(via_range))
    return SteeringResult(prob, target, range_part, weight, residuals)


@dataclass(frozen=True, eq=False)
class Reachability:
    reachable: bool
    n_bar: np.ndarray | None
    probability: float
    outside_norm: float
    """``||(I - Q_A) phi||``, the part of the request outside the range of ``rho_A``."""
    roundtrip_overlap: float


def reachable(state: BipartiteState, phi_a, tol: TolerancePolicy = DEFAULT_TOL) -> Reachability:
    """Can A be steered into ``phi_a``? If so, which nearby state does it?"""
    phi = _check_unit(phi_a, tol, "phi_a")
    dec = schmidt(state, tol)
    q_a = dec.vectors_a @ dec.vectors_a.conj().T
    outside = norm(phi - q_a @ phi)
    if outside > tol.eps_check:
        return Reachability(False, None, 0.0, outside, 0.0)
    u = correlation_operator_from_schmidt(dec)
    n_bar = pinv_sqrt(reduced_rho_b(state), tol) @ apply_inverse(u, phi)
    n_bar = n_bar / norm(n_bar)
    result = steer(state, n_bar, tol)
    overlap = abs(np.vdot(result.target_a, phi))
    return Reachability(True, n_bar, result.probability, outside, float(overlap))


@dataclass(frozen=True, eq=False)
class HadjisavvasWitness:
    """Membership of ``phi`` in ``range(rho^(1/2))`` with a decomposition witness.

    When ``member`` holds, ``rho = weight |phi><phi| + (1 - weight) remainder``
    with ``remainder`` a density operator and ``weight`` the largest such value
    found by bisection (to ``1e-6``).
    """

    member: bool
    outside_norm: float
    weight: float = 0.0
    remainder: np.ndarray | None = None


def hadjisavvas_check(rho, phi, tol: TolerancePolicy = DEFAULT_TOL, weight_tol: float = 1e-6) -> HadjisavvasWitness:
    rho = check_hermitian(rho, tol, "rho")
    phi = _check_unit(phi, tol, "phi")
    q = range_projector(rho, tol)
    outside = norm(phi - q @ phi)
    if outside > tol.eps_check:
        return HadjisavvasWitness(False, outside)
    dyad = np.outer(phi, phi.conj())

    def fits(w):
        return np.linalg.eigvalsh(rho - w * dyad).min() >= -tol.eps_check

    lo, hi = 0.0, 1.0
    if fits(hi):
        lo = hi
    while hi - lo > weight_tol:
        mid = (lo + hi) / 2
        if fits(mid):
            lo = mid
        else:
            hi = mid
    remainder = None
    if lo < 1.0 - weight_tol:
        remainder = (rho - lo * dyad) / (1.0 - lo)
    return HadjisavvasWitness(True, outside, lo, remainder)
