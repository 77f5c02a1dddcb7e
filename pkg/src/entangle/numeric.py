"""Dense complex linear algebra and the tolerance policy used by every module.

All routines take and return plain numpy arrays. Vectors are 1-D, operators
are 2-D, and eigen/singular vectors are returned as the *columns* of a
matrix. Nothing here mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonFinite, NotHermitian, NotPSD


@dataclass(frozen=True)
class TolerancePolicy:
    """Numerical cutoffs.

    Attributes:
        eps_rank: singular values / eigenvalues at or below this are treated as zero.
        eps_degeneracy: absolute gap below which neighbouring eigenvalues are merged.
        eps_check: tolerance for verifying identities (residual norms).
    """

    eps_rank: float = 1e-10
    eps_degeneracy: float = 1e-8
    eps_check: float = 1e-9

    def __post_init__(self):
        for name in ("eps_rank", "eps_degeneracy", "eps_check"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if self.eps_rank > self.eps_degeneracy:
            raise ValueError("eps_rank must not exceed eps_degeneracy")


DEFAULT_TOL = TolerancePolicy()


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_matrix(x, name: str = "matrix") -> np.ndarray:
    """Return ``x`` as a finite 2-D complex array (a fresh copy)."""
    a = np.array(x, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains NaN or Inf")
    return a


def as_vector(x, name: str = "vector") -> np.ndarray:
    a = np.array(x, dtype=complex)
    if a.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains NaN or Inf")
    return a


def norm(x) -> float:
    """Frobenius (or Euclidean) norm."""
    return float(np.linalg.norm(x))


def dyad(ket, bra=None) -> np.ndarray:
    """``|ket><bra|``; with one argument the projector-like dyad ``|ket><ket|``."""
    ket = np.asarray(ket)
    bra = ket if bra is None else np.asarray(bra)
    return np.outer(ket, bra.conj())


def commutator(x, y) -> np.ndarray:
    return x @ y - y @ x


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its largest-modulus entry is real and positive."""
    k = int(np.argmax(np.abs(v)))
    if abs(v[k]) == 0:
        return v
    return v * (abs(v[k]) / v[k])


def check_hermitian(h, tol: TolerancePolicy = DEFAULT_TOL, name: str = "matrix") -> np.ndarray:
    h = as_matrix(h, name)
    if h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {h.shape}")
    asym = norm(h - h.conj().T)
    if asym > tol.eps_check:
        raise NotHermitian(f"{name} is not Hermitian: ||H - H^dag|| = {asym:.3e}")
    return (h + h.conj().T) / 2


def hermitian_eig(h, tol: TolerancePolicy = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns:
        ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
        orthonormal eigenvectors as columns, each phase-fixed so that its
        largest-modulus entry is real positive.
    """
    h = check_hermitian(h, tol)
    w, v = np.linalg.eigh(h)
    v = np.column_stack([fix_phase(v[:, k]) for k in range(v.shape[1])])
    return w, v


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Unique spectral form ``sum_k value_k P_k`` with distinct values."""

    eigenvalues: np.ndarray
    projectors: tuple[np.ndarray, ...]
    ranks: tuple[int, ...] = field(default=())

    def __post_init__(self):
        _frozen(np.asarray(self.eigenvalues))
        for p in self.projectors:
            _frozen(p)
        if not self.ranks:
            object.__setattr__(
                self, "ranks", tuple(int(round(np.trace(p).real)) for p in self.projectors)
            )

    def __len__(self) -> int:
        return len(self.projectors)

    def matrix(self) -> np.ndarray:
        dim = self.projectors[0].shape[0]
        out = np.zeros((dim, dim), dtype=complex)
        for value, p in zip(self.eigenvalues, self.projectors):
            out += value * p
        return out


def degenerate_groups(values, gap: float) -> list[list[int]]:
    """Split sorted ``values`` into runs whose neighbours differ by at most ``gap``."""
    groups: list[list[int]] = []
    for k in range(len(values)):
        if groups and abs(values[k] - values[groups[-1][-1]]) <= gap:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def group_spectrum(
    eigenvalues, eigenvectors, tol: TolerancePolicy = DEFAULT_TOL
) -> SpectralDecomposition:
    """Merge consecutive eigenvalues closer than ``eps_degeneracy`` into one projector.

    The representative value of each group is the mean of its members.
    """
    w = np.asarray(eigenvalues, dtype=float)
    v = np.asarray(eigenvectors, dtype=complex)
    if len(w) != v.shape[1]:
        raise DimensionMismatch("eigenvalue count differs from eigenvector count")
    order = np.argsort(w, kind="stable")
    w, v = w[order], v[:, order]
    groups = degenerate_groups(w, tol.eps_degeneracy)
    values = np.array([w[g].mean() for g in groups])
    projectors = tuple(v[:, g] @ v[:, g].conj().T for g in groups)
    return SpectralDecomposition(values, projectors, tuple(len(g) for g in groups))


def spectral_decomposition(h, tol: TolerancePolicy = DEFAULT_TOL) -> SpectralDecomposition:
    return group_spectrum(*hermitian_eig(h, tol), tol)


def _psd_eig(rho, tol: TolerancePolicy) -> tuple[np.ndarray, np.ndarray]:
    w, v = hermitian_eig(rho, tol)
    if w.size and w.min() < -tol.eps_check:
        raise NotPSD(f"matrix has eigenvalue {w.min():.3e} < -eps_check")
    return np.clip(w, 0.0, None), v


def psd_sqrt(rho, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Positive square root of a positive semidefinite matrix."""
    w, v = _psd_eig(rho, tol)
    return (v * np.sqrt(w)) @ v.conj().T


def pinv_sqrt(rho, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Inverse of ``rho^(1/2)`` on its range, zero on the null space."""
    w, v = _psd_eig(rho, tol)
    keep = w > tol.eps_rank
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (v * inv) @ v.conj().T


def range_projector(rho, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors with eigenvalue > eps_rank."""
    w, v = _psd_eig(rho, tol)
    keep = v[:, w > tol.eps_rank]
    return keep @ keep.conj().T


def svd(c, tol: TolerancePolicy = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD truncated at ``eps_rank``.

    Returns ``(left, singulars, right)`` with ``c = left @ diag(singulars) @ right^dag``.
    Singular values are descending; each left vector is phase-fixed and its
    right partner rotated by the same phase so the product is unchanged.
    """
    c = as_matrix(c, "matrix")
    u, s, vh = np.linalg.svd(c, full_matrices=False)
    keep = s > tol.eps_rank
    u, s, v = u[:, keep], s[keep], vh[keep].conj().T
    for k in range(len(s)):
        fixed = fix_phase(u[:, k])
        idx = int(np.argmax(np.abs(u[:, k])))
        phase = fixed[idx] / u[idx, k]
        u[:, k] = fixed
        v[:, k] = v[:, k] * phase
    return u, s, v
