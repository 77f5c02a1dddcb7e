"""Bipartite pure states, subsystem-basis expansion, partial scalar product and partial trace.

A state ``|Psi> = sum_mn C[m, n] |m>_A |n>_B`` is stored as its coefficient
matrix ``C`` (shape ``dim_a x dim_b``). Composite indices are A-major:
``(m, n) -> m * dim_b + n``, which is exactly ``C.reshape(-1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimBTooSmall, DimensionMismatch, NotPSD, NotUnitTrace, ZeroState
from .numeric import (
    DEFAULT_TOL,
    TolerancePolicy,
    as_matrix,
    as_vector,
    check_hermitian,
    hermitian_eig,
    norm,
)


@dataclass(frozen=True, eq=False)
class BipartiteState:
    coeff: np.ndarray
    normalization_applied: bool = False

    def __post_init__(self):
        self.coeff.setflags(write=False)

    @property
    def dim_a(self) -> int:
        return self.coeff.shape[0]

    @property
    def dim_b(self) -> int:
        return self.coeff.shape[1]

    @property
    def dims(self) -> tuple[int, int]:
        return self.coeff.shape

    @property
    def vector(self) -> np.ndarray:
        """The composite state vector in A-major order."""
        return self.coeff.reshape(-1)

    def density(self) -> np.ndarray:
        """The full dyad ``|Psi><Psi|`` on the composite space."""
        v = self.vector
        return np.outer(v, v.conj())


def make_state(coeff, tol: TolerancePolicy = DEFAULT_TOL) -> BipartiteState:
    """Build a normalized state from a coefficient matrix.

    ``normalization_applied`` on the result is set when the input norm differed
    from one by more than ``eps_check``.

    Raises:
        ZeroState: the matrix is identically zero.
    """
    c = as_matrix(coeff, "coeff")
    n = norm(c)
    if n == 0:
        raise ZeroState("coefficient matrix is zero")
    return BipartiteState(c / n, abs(n - 1.0) > tol.eps_check)


def state_from_vector(vector, dims: tuple[int, int], tol: TolerancePolicy = DEFAULT_TOL) -> BipartiteState:
    v = as_vector(vector, "state vector")
    dim_a, dim_b = dims
    if v.size != dim_a * dim_b:
        raise DimensionMismatch(f"vector of length {v.size} does not fit dims {dims}")
    return make_state(v.reshape(dim_a, dim_b), tol)


def product_state(psi_a, phi_b, tol: TolerancePolicy = DEFAULT_TOL) -> BipartiteState:
    return make_state(np.outer(as_vector(psi_a), as_vector(phi_b)), tol)


def on_a(op_a, dim_b: int) -> np.ndarray:
    """Lift an A-side operator to ``op_a (x) I_B``."""
    return np.kron(op_a, np.eye(dim_b))


def on_b(dim_a: int, op_b) -> np.ndarray:
    """Lift a B-side operator to ``I_A (x) op_b``."""
    return np.kron(np.eye(dim_a), op_b)


@dataclass(frozen=True, eq=False)
class SubsystemBasis:
    """A complete orthonormal basis of one factor space, stored as columns."""

    side: str
    vectors: np.ndarray

    def __post_init__(self):
        if self.side not in ("A", "B"):
            raise ValueError(f"side must be 'A' or 'B', got {self.side!r}")
        self.vectors.setflags(write=False)

    @classmethod
    def from_columns(cls, side: str, vectors, tol: TolerancePolicy = DEFAULT_TOL) -> "SubsystemBasis":
        v = as_matrix(vectors, "basis")
        if v.shape[0] != v.shape[1]:
            raise DimensionMismatch(f"basis must be complete, got {v.shape[1]} vectors in dim {v.shape[0]}")
        gram_err = norm(v.conj().T @ v - np.eye(v.shape[0]))
        if gram_err > tol.eps_check:
            raise ValueError(f"basis vectors are not orthonormal (residual {gram_err:.3e})")
        return cls(side, v)

    @classmethod
    def standard(cls, side: str, dim: int) -> "SubsystemBasis":
        return cls(side, np.eye(dim, dtype=complex))

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def __len__(self) -> int:
        return self.vectors.shape[1]

    def __getitem__(self, n: int) -> np.ndarray:
        return self.vectors[:, n]


@dataclass(frozen=True, eq=False)
class ExpansionInBasis:
    """``|Psi> = sum_n coefficient_n (x) basis_n``.

    ``coefficients[:, n]`` is the (unnormalized, possibly zero) A-side vector
    paired with ``basis[n]``. Zero coefficients are kept so indices align.
    """

    basis: SubsystemBasis
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients.setflags(write=False)

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.coefficients, axis=0)

    def reassemble(self) -> np.ndarray:
        """Coefficient matrix of ``sum_n coefficient_n (x) basis_n``."""
        return self.coefficients @ self.basis.vectors.T


def partial_scalar_product(phi_b, state: BipartiteState) -> np.ndarray:
    """``(<phi|_B |Psi>_AB)_A``, conjugate-linear in ``phi_b``.

    Non-unit ``phi_b`` scales the result by its norm.
    """
    phi = as_vector(phi_b, "phi")
    if phi.size != state.dim_b:
        raise DimensionMismatch(f"phi has dimension {phi.size}, subsystem B has {state.dim_b}")
    return state.coeff @ phi.conj()


def partial_scalar_product_a(phi_a, state: BipartiteState) -> np.ndarray:
    """``(<phi|_A |Psi>_AB)_B``: the mirror image contracting the A factor."""
    phi = as_vector(phi_a, "phi")
    if phi.size != state.dim_a:
        raise DimensionMismatch(f"phi has dimension {phi.size}, subsystem A has {state.dim_a}")
    return state.coeff.T @ phi.conj()


def expand_in_basis(state: BipartiteState, basis: SubsystemBasis) -> ExpansionInBasis:
    if basis.side != "B":
        raise DimensionMismatch("expansion is over a B-side basis")
    if basis.dim != state.dim_b:
        raise DimensionMismatch(f"basis dimension {basis.dim} != dim_b {state.dim_b}")
    return ExpansionInBasis(basis, state.coeff @ basis.vectors.conj())


def _split(op, dims: tuple[int, int]) -> np.ndarray:
    o = as_matrix(op, "operator")
    dim_a, dim_b = dims
    d = dim_a * dim_b
    if o.shape != (d, d):
        raise DimensionMismatch(f"operator shape {o.shape} does not match composite dims {dims}")
    return o.reshape(dim_a, dim_b, dim_a, dim_b)


def partial_trace_b(op, dims: tuple[int, int]) -> np.ndarray:
    """Trace out subsystem B: ``(Tr_B O)[m, m'] = sum_n O[(m, n), (m', n)]``."""
    return np.einsum("injn->ij", _split(op, dims))


def partial_trace_a(op, dims: tuple[int, int]) -> np.ndarray:
    """Trace out subsystem A: ``(Tr_A O)[n, n'] = sum_m O[(m, n), (m, n')]``."""
    return np.einsum("kikj->ij", _split(op, dims))


def reduced_rho_a(state: BipartiteState) -> np.ndarray:
    c = state.coeff
    return c @ c.conj().T


def reduced_rho_b(state: BipartiteState) -> np.ndarray:
    c = state.coeff
    return (c.conj().T @ c).conj()


def purify(rho, dim_b: int, tol: TolerancePolicy = DEFAULT_TOL) -> BipartiteState:
    """A pure state on ``A x B`` whose A-reduced density equals ``rho``.

    ``rho`` is written as the mixture of its eigen-dyads
    ``sum_n (sqrt(p_n)|n>)(sqrt(p_n)<n|)`` and each term is paired with the
    n-th standard basis vector of B.

    Raises:
        NotPSD, NotUnitTrace, DimBTooSmall
    """
    rho = check_hermitian(rho, tol, "rho")
    trace = np.trace(rho).real
    if abs(trace - 1.0) > tol.eps_check:
        raise NotUnitTrace(f"trace is {trace!r}")
    w, v = hermitian_eig(rho, tol)
    if w.min() < -tol.eps_check:
        raise NotPSD(f"rho has eigenvalue {w.min():.3e}")
    order = np.argsort(w)[::-1]
    w, v = np.clip(w[order], 0.0, None), v[:, order]
    rank = int(np.sum(w > tol.eps_rank))
    if dim_b < rank:
        raise DimBTooSmall(f"rank {rank} needs dim_b >= {rank}, got {dim_b}")
    # eigenvalues below eps_rank still get a column when dim_b has room for them
    keep = min(dim_b, w.size)
    coeff = np.zeros((rho.shape[0], dim_b), dtype=complex)
    coeff[:, :keep] = v[:, :keep] * np.sqrt(w[:keep])
    return make_state(coeff, tol)
