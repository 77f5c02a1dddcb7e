"""The antiunitary correlation operator of a bipartite state.

An antilinear map ``T`` is stored as a matrix ``M`` together with the fixed
action ``T(phi) = M @ conj(phi)``; complex conjugation is applied first, then
the matrix. Consequences used throughout:

* ``T^-1(psi) = conj(M^dag @ psi)`` on the range of ``T``;
* ``T X T^-1`` (for linear ``X``) has matrix ``M @ conj(X) @ M^dag``;
* composing two antilinear maps gives a *linear* map,
  ``T1(T2(phi)) = (M1 @ conj(M2)) @ phi``.

For the correlation operator ``M = sum_i a_i b_i^dag`` where ``(a_i, s_i, b_i)``
is the SVD of the coefficient matrix. It sends the B-side Schmidt vector
``conj(b_i)`` to ``a_i`` and vanishes on the null space of ``rho_B``; it is
the extension ``U_a Q_B`` that is total on the B factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bipartite import BipartiteState, ExpansionInBasis, SubsystemBasis, partial_scalar_product, reduced_rho_b
from .errors import DimensionMismatch
from .numeric import DEFAULT_TOL, TolerancePolicy, as_matrix, as_vector, pinv_sqrt, psd_sqrt
from .schmidt import SchmidtDecomposition, schmidt


@dataclass(frozen=True, eq=False)
class AntilinearOperator:
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __call__(self, phi) -> np.ndarray:
        return apply(self, phi)

    def inverse(self, psi) -> np.ndarray:
        return apply_inverse(self, psi)


def apply(u: AntilinearOperator, phi) -> np.ndarray:
    phi = as_vector(phi, "phi")
    if phi.size != u.shape[1]:
        raise DimensionMismatch(f"vector of dimension {phi.size}, operator expects {u.shape[1]}")
    return u.matrix @ phi.conj()


def apply_inverse(u: AntilinearOperator, psi) -> np.ndarray:
    """Pull an A-side vector back to B; ``apply_inverse(u, apply(u, phi)) = Q_B phi``."""
    psi = as_vector(psi, "psi")
    if psi.size != u.shape[0]:
        raise DimensionMismatch(f"vector of dimension {psi.size}, operator maps into {u.shape[0]}")
    return (u.matrix.conj().T @ psi).conj()


def compose(outer: AntilinearOperator, inner: AntilinearOperator) -> np.ndarray:
    """Matrix of the linear map ``outer o inner``."""
    if outer.shape[1] != inner.shape[0]:
        raise DimensionMismatch("inner operator's codomain does not match outer's domain")
    return outer.matrix @ inner.matrix.conj()


def correlation_operator(state: BipartiteState, tol: TolerancePolicy = DEFAULT_TOL) -> AntilinearOperator:
    return correlation_operator_from_schmidt(schmidt(state, tol))


def correlation_operator_from_schmidt(dec: SchmidtDecomposition) -> AntilinearOperator:
    # a_i b_i^dag with b_i = conj(vectors_b[:, i])
    return AntilinearOperator(dec.vectors_a @ dec.vectors_b.T)


def correlation_operator_from_basis(state: BipartiteState, basis_b, tol: TolerancePolicy = DEFAULT_TOL) -> AntilinearOperator:
    """Build the operator from an arbitrary orthonormal eigen-sub-basis of ``rho_B``.

    ``basis_b`` holds, as columns, eigenvectors of ``rho_B`` spanning its range.
    Each partner is the normalized expansion coefficient of the state in that
    vector, and the operator is ``sum_k partner_k basis_k^T``. Different
    choices inside a degenerate eigenspace must give the same matrix.
    """
    v = as_matrix(basis_b, "basis")
    if v.shape[0] != state.dim_b:
        raise DimensionMismatch(f"basis vectors have dimension {v.shape[0]}, dim_b is {state.dim_b}")
    m = np.zeros((state.dim_a, state.dim_b), dtype=complex)
    for k in range(v.shape[1]):
        coeff = partial_scalar_product(v[:, k], state)
        size = np.linalg.norm(coeff)
        if size <= tol.eps_rank:
            raise ValueError(f"basis vector {k} lies in the null space of rho_B")
        m += np.outer(coeff / size, v[:, k])
    return AntilinearOperator(m)


def correlation_operator_from_expansion(state: BipartiteState, tol: TolerancePolicy = DEFAULT_TOL) -> AntilinearOperator:
    """Solve ``C = M conj(rho_B^(1/2))`` for ``M`` on the range of ``rho_B``.

    This uses only expansion coefficients and ``rho_B``; no Schmidt vectors.
    """
    return AntilinearOperator(state.coeff @ pinv_sqrt(reduced_rho_b(state), tol).conj())


def operator_image(u: AntilinearOperator, x) -> np.ndarray:
    """Matrix of ``U X U^-1 Q_A`` for a B-side operator ``X``."""
    x = as_matrix(x, "operator")
    if x.shape != (u.shape[1], u.shape[1]):
        raise DimensionMismatch(f"operator shape {x.shape}, expected {(u.shape[1],) * 2}")
    return u.matrix @ x.conj() @ u.matrix.conj().T


def operator_preimage(u: AntilinearOperator, y) -> np.ndarray:
    """Matrix of ``U^-1 Y U Q_B`` for an A-side operator ``Y``."""
    y = as_matrix(y, "operator")
    if y.shape != (u.shape[0], u.shape[0]):
        raise DimensionMismatch(f"operator shape {y.shape}, expected {(u.shape[0],) * 2}")
    return (u.matrix.conj().T @ y @ u.matrix).conj()


def expansion_coefficient_via_ua(state: BipartiteState, u: AntilinearOperator, rho_b, n_b, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """``U rho_B^(1/2) |n>_B``; equals the partial scalar product ``<n|_B |Psi>``."""
    n_b = as_vector(n_b, "n_b")
    if n_b.size != state.dim_b:
        raise DimensionMismatch(f"n_b has dimension {n_b.size}, dim_b is {state.dim_b}")
    return apply(u, psd_sqrt(rho_b, tol) @ n_b)


@dataclass(frozen=True, eq=False)
class CorrelatedDecomposition:
    """``|Psi> = sum_i s_i (U |i>_B) (x) |i>_B`` over an eigen-sub-basis of ``rho_B``."""

    coefficients: np.ndarray
    vectors_b: np.ndarray
    operator: AntilinearOperator

    def partners(self) -> np.ndarray:
        """``U`` applied to each column of ``vectors_b``."""
        return self.operator.matrix @ self.vectors_b.conj()

    def reassemble(self) -> np.ndarray:
        return (self.partners() * self.coefficients) @ self.vectors_b.T


def correlated_decomposition(state: BipartiteState, tol: TolerancePolicy = DEFAULT_TOL) -> CorrelatedDecomposition:
    dec = schmidt(state, tol)
    return CorrelatedDecomposition(dec.coefficients, dec.vectors_b, correlation_operator_from_schmidt(dec))


def generalized_decomposition(state: BipartiteState, basis: SubsystemBasis, tol: TolerancePolicy = DEFAULT_TOL) -> ExpansionInBasis:
    """Expansion in an arbitrary B basis with coefficients ``U rho_B^(1/2) |n>_B``."""
    if basis.side != "B" or basis.dim != state.dim_b:
        raise DimensionMismatch("expected a complete B-side basis of matching dimension")
    u = correlation_operator(state, tol)
    root = psd_sqrt(reduced_rho_b(state), tol)
    coefficients = u.matrix @ (root @ basis.vectors).conj()
    return ExpansionInBasis(basis, coefficients)


def state_from_correlation(rho_b, u: AntilinearOperator, tol: TolerancePolicy = DEFAULT_TOL) -> BipartiteState:
    """The state determined by a pair ``(rho_B, U)``: ``sum_n U rho_B^(1/2)|n> (x) |n>``."""
    root = psd_sqrt(rho_b, tol)
    if root.shape[0] != u.shape[1]:
        raise DimensionMismatch("rho_B and the operator disagree on dim_b")
    return BipartiteState(u.matrix @ root.conj())
