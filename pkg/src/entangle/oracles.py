"""Brute-force reference routes.

Each function here evaluates a quantity straight from its defining sum over
basis kets of the composite space, with explicit Kronecker products and
loops. They share no code with the fast paths they are used to check.
"""

from __future__ import annotations

import numpy as np


def _ket(dim: int, k: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[k] = 1.0
    return e


def partial_trace_b(op, dims) -> np.ndarray:
    """``<m| Tr_B O |m'> = sum_n <m|<n| O |m'>|n>`` with explicit kets."""
    dim_a, dim_b = dims
    out = np.zeros((dim_a, dim_a), dtype=complex)
    for m in range(dim_a):
        for mp in range(dim_a):
            for n in range(dim_b):
                bra = np.kron(_ket(dim_a, m), _ket(dim_b, n))
                ket = np.kron(_ket(dim_a, mp), _ket(dim_b, n))
                out[m, mp] += np.vdot(bra, op @ ket)
    return out


def partial_trace_a(op, dims) -> np.ndarray:
    dim_a, dim_b = dims
    out = np.zeros((dim_b, dim_b), dtype=complex)
    for n in range(dim_b):
        for np_ in range(dim_b):
            for m in range(dim_a):
                bra = np.kron(_ket(dim_a, m), _ket(dim_b, n))
                ket = np.kron(_ket(dim_a, m), _ket(dim_b, np_))
                out[n, np_] += np.vdot(bra, op @ ket)
    return out


def psp_via_a_basis(phi_b, psi, dims, basis_a) -> np.ndarray:
    """``sum_m (<m|_A <phi|_B |Psi>) |m>_A`` for an arbitrary A basis (columns)."""
    out = np.zeros(dims[0], dtype=complex)
    for m in range(basis_a.shape[1]):
        out += np.vdot(np.kron(basis_a[:, m], phi_b), psi) * basis_a[:, m]
    return out


def psp_via_b_representation(phi_b, psi, dims, basis_b) -> np.ndarray:
    """Components ``sum_q conj(<q|phi>) <m|<q|Psi>`` in an arbitrary B basis ``{|q>}``."""
    dim_a, _ = dims
    out = np.zeros(dim_a, dtype=complex)
    for m in range(dim_a):
        for q in range(basis_b.shape[1]):
            amp = np.vdot(np.kron(_ket(dim_a, m), basis_b[:, q]), psi)
            out[m] += np.conj(np.vdot(basis_b[:, q], phi_b)) * amp
    return out


def psp_via_product_terms(phi_b, coeff) -> np.ndarray:
    """Split the state into product terms ``C_mn |m>|n>`` and contract each one."""
    dim_a, dim_b = coeff.shape
    out = np.zeros(dim_a, dtype=complex)
    for m in range(dim_a):
        for n in range(dim_b):
            out += coeff[m, n] * np.vdot(phi_b, _ket(dim_b, n)) * _ket(dim_a, m)
    return out


def steering_collapse(psi, dims, n_bar) -> tuple[float, np.ndarray | None]:
    """Apply ``I (x) |n><n|`` to the composite vector; return probability and A factor."""
    dim_a, dim_b = dims
    post = np.kron(np.eye(dim_a), np.outer(n_bar, n_bar.conj())) @ psi
    prob = float(np.vdot(post, post).real)
    if prob < 1e-300:
        return 0.0, None
    # post = |a> (x) |n>; pick the A factor by contracting with <n|
    a = np.array([np.vdot(np.kron(_ket(dim_a, m), n_bar), post) for m in range(dim_a)])
    return prob, a / np.linalg.norm(a)


def largest_pure_weight(rho, phi) -> float:
    """Largest ``w`` with ``rho - w |phi><phi|`` positive: ``1 / <phi| rho^+ |phi>``."""
    return float(1.0 / np.vdot(phi, np.linalg.pinv(rho, hermitian=True) @ phi).real)
