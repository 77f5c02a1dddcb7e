"""Twin observables and the twin-correlated Schmidt decomposition.

Two opposite-subsystem observables are twins in ``|Psi>`` when their
non-nullifying eigenprojectors can be paired so that ``P_A |Psi> = P_B |Psi>``
for every pair. In coefficient-matrix form the two sides act as

    (P_A (x) I)|Psi>  ->  P_A @ C
    (I (x) P_B)|Psi>  ->  C @ P_B.T
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bipartite import BipartiteState, reduced_rho_a, reduced_rho_b
from .correlation import correlation_operator_from_schmidt, operator_image
from .errors import DimensionMismatch, NoTwin
from .numeric import (
    DEFAULT_TOL,
    SpectralDecomposition,
    TolerancePolicy,
    check_hermitian,
    commutator,
    norm,
    spectral_decomposition,
)
from .schmidt import schmidt, subsystem_picture_from


@dataclass(frozen=True, eq=False)
class Observable:
    matrix: np.ndarray
    spectral: SpectralDecomposition

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @classmethod
    def from_matrix(cls, h, tol: TolerancePolicy = DEFAULT_TOL) -> "Observable":
        h = check_hermitian(h, tol, "observable")
        return cls(h, spectral_decomposition(h, tol))

    @classmethod
    def from_spectrum(cls, values, projectors) -> "Observable":
        """Assemble ``sum_k values[k] projectors[k]``; values must be distinct."""
        values = np.asarray(values, dtype=float)
        if len(set(values.tolist())) != len(values):
            raise ValueError("eigenvalues must be distinct")
        order = np.argsort(values)
        values = values[order]
        projectors = tuple(np.array(projectors[k], dtype=complex) for k in order)
        spectral = SpectralDecomposition(values, projectors)
        return cls(spectral.matrix(), spectral)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectral.eigenvalues

    @property
    def projectors(self) -> tuple[np.ndarray, ...]:
        return self.spectral.projectors


def as_observable(o, tol: TolerancePolicy = DEFAULT_TOL) -> Observable:
    return o if isinstance(o, Observable) else Observable.from_matrix(o, tol)


def _on_a(p, state: BipartiteState) -> np.ndarray:
    return p @ state.coeff


def _on_b(p, state: BipartiteState) -> np.ndarray:
    return state.coeff @ p.T


@dataclass(frozen=True)
class TwinMatch:
    index_a: int
    index_b: int
    proj_a: np.ndarray = field(repr=False)
    proj_b: np.ndarray = field(repr=False)
    value_a: float
    value_b: float
    residual: float


@dataclass(frozen=True, eq=False)
class TwinPair:
    """Outcome of the twin test.

    ``matched`` pairs non-nullifying eigenprojectors (sorted by B index) with
    their residual ``||(P_A (x) I - I (x) P_B)|Psi>||``. When ``ok`` is false the
    matching is the best one found and ``unmatched_a``/``unmatched_b`` list the
    leftover eigenprojector indices.
    """

    ok: bool
    matched: tuple[TwinMatch, ...]
    nullify_a: np.ndarray
    nullify_b: np.ndarray
    unmatched_a: tuple[int, ...] = ()
    unmatched_b: tuple[int, ...] = ()

    @property
    def max_residual(self) -> float:
        return max((m.residual for m in self.matched), default=0.0)

    def __len__(self) -> int:
        return len(self.matched)


def is_twin_pair(state: BipartiteState, o_a, o_b, tol: TolerancePolicy = DEFAULT_TOL) -> TwinPair:
    o_a, o_b = as_observable(o_a, tol), as_observable(o_b, tol)
    if o_a.dim != state.dim_a or o_b.dim != state.dim_b:
        raise DimensionMismatch(f"observables of dims {(o_a.dim, o_b.dim)} on a {state.dims} state")

    def split(obs, act, dim):
        live, null = [], np.zeros((dim, dim), dtype=complex)
        for k, p in enumerate(obs.projectors):
            if norm(act(p, state)) <= tol.eps_check:
                null += p
            else:
                live.append(k)
        return live, null

    live_a, null_a = split(o_a, _on_a, state.dim_a)
    live_b, null_b = split(o_b, _on_b, state.dim_b)
    candidates = sorted(
        (norm(_on_a(o_a.projectors[k], state) - _on_b(o_b.projectors[l], state)), k, l)
        for k in live_a
        for l in live_b
    )
    used_a, used_b, matches = set(), set(), []
    for residual, k, l in candidates:
        if k in used_a or l in used_b:
            continue
        used_a.add(k)
        used_b.add(l)
        matches.append(
            TwinMatch(k, l, o_a.projectors[k], o_b.projectors[l], float(o_a.eigenvalues[k]), float(o_b.eigenvalues[l]), residual)
        )
    matches.sort(key=lambda m: m.index_b)
    unmatched_a = tuple(k for k in live_a if k not in used_a)
    unmatched_b = tuple(l for l in live_b if l not in used_b)
    ok = not unmatched_a and not unmatched_b and all(m.residual <= tol.eps_check for m in matches)
    return TwinPair(ok, tuple(matches), null_a, null_b, unmatched_a, unmatched_b)


def twin_commutator_norm(state: BipartiteState, o_b) -> float:
    """``||[O_B, rho_B]||``, the quantity deciding whether a twin exists."""
    o_b = o_b.matrix if isinstance(o_b, Observable) else np.asarray(o_b, dtype=complex)
    return norm(commutator(o_b, reduced_rho_b(state)))


def has_twin(state: BipartiteState, o_b, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    return twin_commutator_norm(state, o_b) <= tol.eps_check


@dataclass(frozen=True, eq=False)
class MinimalObservable:
    """The part of ``O_B`` that acts on the range of ``rho_B``.

    ``minimal_projectors[m] = Q_B P^m Q_B`` for each non-nullifying eigenprojector
    ``P^m`` of ``observable`` (listed in ``indices``, with eigenvalues ``values``).
    """

    observable: Observable
    minimal_projectors: tuple[np.ndarray, ...]
    values: np.ndarray
    indices: tuple[int, ...]

    @property
    def matrix(self) -> np.ndarray:
        dim = self.observable.dim
        return sum((v * p for v, p in zip(self.values, self.minimal_projectors)), np.zeros((dim, dim), dtype=complex))


def _require_twin(state, o_b, tol) -> Observable:
    o_b = as_observable(o_b, tol)
    if o_b.dim != state.dim_b:
        raise DimensionMismatch(f"observable of dim {o_b.dim} on subsystem B of dim {state.dim_b}")
    residual = twin_commutator_norm(state, o_b)
    if residual > tol.eps_check:
        raise NoTwin(f"observable does not commute with rho_B (||[O_B, rho_B]|| = {residual:.3e})")
    return o_b


def minimal_part(state: BipartiteState, o_b, tol: TolerancePolicy = DEFAULT_TOL) -> MinimalObservable:
    o_b = _require_twin(state, o_b, tol)
    dec = schmidt(state, tol)
    q_b = dec.vectors_b @ dec.vectors_b.conj().T
    projs, values, indices = [], [], []
    for k, p in enumerate(o_b.projectors):
        if norm(_on_b(p, state)) <= tol.eps_check:
            continue
        projs.append(q_b @ p @ q_b)
        values.append(o_b.eigenvalues[k])
        indices.append(k)
    return MinimalObservable(o_b, tuple(projs), np.array(values), tuple(indices))


def construct_twin(state: BipartiteState, o_b, values=None, tol: TolerancePolicy = DEFAULT_TOL) -> Observable:
    """The minimal twin ``O_A^min = sum_m o_m U P_B^{min,m} U^-1 Q_A``.

    ``values`` are the eigenvalues ``o_m`` given to the twin projectors, in the
    order of the non-nullifying eigenprojectors of ``o_b``; they must be
    distinct and nonzero. The default is ``1, 2, 3, ...``. The null space of
    ``rho_A`` gets eigenvalue 0.

    Raises:
        NoTwin: ``o_b`` does not commute with ``rho_B``.
    """
    minimal = minimal_part(state, o_b, tol)
    u = correlation_operator_from_schmidt(schmidt(state, tol))
    projs = [operator_image(u, p) for p in minimal.minimal_projectors]
    return observable_on_range(projs, values, u.matrix @ u.matrix.conj().T)


def observable_on_range(projectors, values, range_proj) -> Observable:
    """``sum_m values[m] projectors[m]`` plus eigenvalue 0 on ``I - range_proj``.

    ``values`` default to ``1, 2, 3, ...`` and must be distinct and nonzero.
    """
    count = len(projectors)
    values = np.arange(1, count + 1, dtype=float) if values is None else np.asarray(values, dtype=float)
    if len(values) != count:
        raise ValueError(f"need {count} eigenvalues, got {len(values)}")
    if np.any(values == 0):
        raise ValueError("twin eigenvalues must be nonzero")
    projs = list(projectors)
    rest = np.eye(range_proj.shape[0]) - range_proj
    if np.trace(rest).real > 0.5:
        projs.append(rest)
        values = np.append(values, 0.0)
    return Observable.from_spectrum(values, projs)


@dataclass(frozen=True, eq=False)
class TwinBlock:
    """One nonzero subspace ``R(Q_B^j) & R(P_B^{min,m})`` with its A-side partners."""

    j: int
    m: int
    r: float
    vectors_b: np.ndarray
    vectors_a: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors_b.shape[1]


@dataclass(frozen=True, eq=False)
class TwinSchmidtDecomposition:
    blocks: tuple[TwinBlock, ...]
    dims: tuple[int, int]

    def reassemble(self) -> np.ndarray:
        c = np.zeros(self.dims, dtype=complex)
        for b in self.blocks:
            c += np.sqrt(b.r) * b.vectors_a @ b.vectors_b.T
        return c

    def rho_b(self) -> np.ndarray:
        """``sum_j r_j sum_m Q_B^j P_B^{min,m}`` rebuilt from the blocks."""
        return sum(b.r * b.vectors_b @ b.vectors_b.conj().T for b in self.blocks)

    def block_projector_b(self, m: int) -> np.ndarray:
        dim_b = self.dims[1]
        out = np.zeros((dim_b, dim_b), dtype=complex)
        for b in self.blocks:
            if b.m == m:
                out += b.vectors_b @ b.vectors_b.conj().T
        return out


def twin_correlated_schmidt(state: BipartiteState, o_b, tol: TolerancePolicy = DEFAULT_TOL) -> TwinSchmidtDecomposition:
    """Schmidt decomposition adapted to both ``rho_B`` and a commuting ``O_B``.

    Blocks are indexed by ``j`` (distinct eigenvalue of ``rho_B``, descending)
    and ``m`` (non-nullifying eigenprojector of ``O_B``, in spectral order);
    only nonzero intersections appear.
    """
    minimal = minimal_part(state, o_b, tol)
    dec = schmidt(state, tol)
    picture = subsystem_picture_from(dec, tol)
    u = correlation_operator_from_schmidt(dec)
    blocks = []
    for j, (r, q_j) in enumerate(zip(picture.distinct_r, picture.proj_b)):
        for m, p_min in enumerate(minimal.minimal_projectors):
            x = q_j @ p_min
            x = (x + x.conj().T) / 2
            w, v = np.linalg.eigh(x)
            # x is a projector up to roundoff, so its eigenvalues sit near 0 or 1
            v = v[:, w > 0.5]
            if v.shape[1] == 0:
                continue
            partners = u.matrix @ v.conj()
            blocks.append(TwinBlock(j, m, float(r), v, partners))
    return TwinSchmidtDecomposition(tuple(blocks), state.dims)


@dataclass(frozen=True, eq=False)
class EprWitness:
    """Result of the EPR test.

    When ``is_epr`` holds, ``observables`` carries two distant (A-side) minimal
    twins built from two different bases of the degenerate eigenspace ``j``,
    and ``commutator_norm`` shows they are incompatible.
    """

    is_epr: bool
    j: int | None = None
    multiplicity: int = 0
    r: float | None = None
    observables: tuple[Observable, Observable] | None = field(default=None, repr=False)
    nearby: tuple[Observable, Observable] | None = field(default=None, repr=False)
    commutator_norm: float = 0.0


def _fourier(k: int) -> np.ndarray:
    idx = np.arange(k)
    return np.exp(2j * np.pi * np.outer(idx, idx) / k) / np.sqrt(k)


def is_epr(state: BipartiteState, tol: TolerancePolicy = DEFAULT_TOL) -> EprWitness:
    dec = schmidt(state, tol)
    picture = subsystem_picture_from(dec, tol)
    degenerate = [j for j, mult in enumerate(picture.multiplicities) if mult >= 2]
    if not degenerate:
        return EprWitness(False)
    j = degenerate[0]
    block = dec.vectors_b[:, list(picture.groups[j])]
    mult = block.shape[1]
    nearby, distant = [], []
    for basis in (block, block @ _fourier(mult)):
        o_b = sum((k + 1) * np.outer(basis[:, k], basis[:, k].conj()) for k in range(mult))
        o_b = Observable.from_matrix(o_b, tol)
        nearby.append(o_b)
        distant.append(construct_twin(state, o_b, tol=tol))
    gap = norm(commutator(distant[0].matrix, distant[1].matrix))
    return EprWitness(True, j, mult, float(picture.distinct_r[j]), tuple(distant), tuple(nearby), gap)


def lueders_change(state: BipartiteState, projectors, side: str) -> np.ndarray:
    """``sum_k P_k |Psi><Psi| P_k`` on the composite space, ``P_k`` acting on ``side``."""
    out = np.zeros((state.dim_a * state.dim_b,) * 2, dtype=complex)
    for p in projectors:
        v = (_on_a(p, state) if side == "A" else _on_b(p, state)).reshape(-1)
        out += np.outer(v, v.conj())
    return out


def twin_commutators(state: BipartiteState, pair: TwinPair) -> float:
    """Largest ``||[P_s^m, rho_s]||`` over matched projectors on both sides."""
    rho_a, rho_b = reduced_rho_a(state), reduced_rho_b(state)
    return max(
        (max(norm(commutator(m.proj_a, rho_a)), norm(commutator(m.proj_b, rho_b))) for m in pair.matched),
        default=0.0,
    )

