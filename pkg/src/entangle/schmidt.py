"""Canonical Schmidt decomposition and the subsystem picture.

The decomposition is read off the SVD ``C = sum_i s_i a_i b_i^dag`` of the
coefficient matrix. Because ``(a b^dag)[m, n] = a_m conj(b_n)``, the B-side
Schmidt partner of ``a_i`` is ``conj(b_i)``:

    |Psi> = sum_i s_i  a_i (x) conj(b_i)

so ``vectors_b`` holds the *conjugated* right singular vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bipartite import BipartiteState
from .errors import DimensionMismatch
from .numeric import DEFAULT_TOL, TolerancePolicy, degenerate_groups, svd


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``|Psi> = sum_i coefficients[i] vectors_a[:, i] (x) vectors_b[:, i]``."""

    coefficients: np.ndarray
    vectors_a: np.ndarray
    vectors_b: np.ndarray

    def __post_init__(self):
        for a in (self.coefficients, self.vectors_a, self.vectors_b):
            a.setflags(write=False)

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    @property
    def probabilities(self) -> np.ndarray:
        """The positive eigenvalues ``r_i = s_i**2`` shared by both reduced densities."""
        return self.coefficients**2

    def coeff_matrix(self) -> np.ndarray:
        return (self.vectors_a * self.coefficients) @ self.vectors_b.T


def schmidt(state: BipartiteState, tol: TolerancePolicy = DEFAULT_TOL) -> SchmidtDecomposition:
    left, s, right = svd(state.coeff, tol)
    return SchmidtDecomposition(s, left, right.conj())


def reconstruct(dec: SchmidtDecomposition, dims: tuple[int, int] | None = None) -> BipartiteState:
    if dims is not None and tuple(dims) != (dec.vectors_a.shape[0], dec.vectors_b.shape[0]):
        raise DimensionMismatch(
            f"decomposition lives in {dec.vectors_a.shape[0]}x{dec.vectors_b.shape[0]}, not {dims}"
        )
    return BipartiteState(dec.coeff_matrix())


def schmidt_rank(state: BipartiteState, tol: TolerancePolicy = DEFAULT_TOL) -> int:
    return schmidt(state, tol).rank


def is_entangled(state: BipartiteState, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Schmidt rank at least two, with the rank cutoff at ``eps_rank``."""
    return schmidt_rank(state, tol) >= 2


@dataclass(frozen=True, eq=False)
class SubsystemPicture:
    """Distinct positive eigenvalues of the reduced densities with paired eigenprojectors.

    ``distinct_r`` is strictly descending. ``groups[j]`` lists the Schmidt
    term indices that make up eigenvalue ``j``.
    """

    distinct_r: np.ndarray
    proj_a: tuple[np.ndarray, ...]
    proj_b: tuple[np.ndarray, ...]
    multiplicities: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.distinct_r)

    def rho_a(self) -> np.ndarray:
        return sum(r * q for r, q in zip(self.distinct_r, self.proj_a))

    def rho_b(self) -> np.ndarray:
        return sum(r * q for r, q in zip(self.distinct_r, self.proj_b))


def subsystem_picture_from(dec: SchmidtDecomposition, tol: TolerancePolicy = DEFAULT_TOL) -> SubsystemPicture:
    r = dec.probabilities
    groups = degenerate_groups(r, tol.eps_degeneracy)
    proj_a, proj_b = [], []
    for g in groups:
        a = dec.vectors_a[:, g]
        b = dec.vectors_b[:, g]
        proj_a.append(a @ a.conj().T)
        proj_b.append(b @ b.conj().T)
    return SubsystemPicture(
        distinct_r=np.array([r[g].mean() for g in groups]),
        proj_a=tuple(proj_a),
        proj_b=tuple(proj_b),
        multiplicities=tuple(len(g) for g in groups),
        groups=tuple(tuple(g) for g in groups),
    )


def subsystem_picture(state: BipartiteState, tol: TolerancePolicy = DEFAULT_TOL) -> SubsystemPicture:
    return subsystem_picture_from(schmidt(state, tol), tol)


def range_projectors(state: BipartiteState, tol: TolerancePolicy = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """``(Q_A, Q_B)``, the projectors onto the ranges of the two reduced densities."""
    dec = schmidt(state, tol)
    a, b = dec.vectors_a, dec.vectors_b
    return a @ a.conj().T, b @ b.conj().T

