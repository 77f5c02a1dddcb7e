"""Random and named test instances: Haar unitaries, states, densities and Hermitian matrices."""

from __future__ import annotations

import numpy as np

from .bipartite import BipartiteState, make_state


def as_rng(seed=None) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def complex_gaussian(rng, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_unitary(dim: int, rng=None) -> np.ndarray:
    """Haar-distributed unitary via QR with the diagonal phases of R divided out."""
    rng = as_rng(rng)
    q, r = np.linalg.qr(complex_gaussian(rng, (dim, dim)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_state(dim_a: int, dim_b: int, rng=None, rank: int | None = None) -> BipartiteState:
    """Random state; with ``rank`` given the coefficient matrix has exactly that rank."""
    rng = as_rng(rng)
    if rank is None:
        return make_state(complex_gaussian(rng, (dim_a, dim_b)))
    return make_state(complex_gaussian(rng, (dim_a, rank)) @ complex_gaussian(rng, (rank, dim_b)))


def random_vector(dim: int, rng=None) -> np.ndarray:
    v = complex_gaussian(as_rng(rng), dim)
    return v / np.linalg.norm(v)


def random_hermitian(dim: int, rng=None) -> np.ndarray:
    g = complex_gaussian(as_rng(rng), (dim, dim))
    return (g + g.conj().T) / 2


def random_density(dim: int, rng=None, rank: int | None = None) -> np.ndarray:
    g = complex_gaussian(as_rng(rng), (dim, rank or dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_operator(dim: int, rng=None) -> np.ndarray:
    return complex_gaussian(as_rng(rng), (dim, dim))


def singlet() -> BipartiteState:
    """``(|0>|1> - |1>|0>)/sqrt(2)`` with ``|0> = spin up``."""
    return make_state(np.array([[0, 1], [-1, 0]]) / np.sqrt(2))
