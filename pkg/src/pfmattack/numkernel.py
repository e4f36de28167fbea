"""Dense complex linear-algebra kernel for small (dim <= 8) Hermitian operators.

Everything downstream (Jones matrices, density operators, POVM elements) is a
2x2 or 3x3 complex matrix, so this module wraps the few eigen-based primitives
the attack construction needs behind deterministic conventions: eigenvalues
sorted ascending and eigenvector phases fixed so results are reproducible
enough for golden-value tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    DomainError,
    NegativeEigenvalueError,
    NoConvergenceError,
    NonHermitianError,
)

HERMITIAN_ATOL = 1e-12
DEFAULT_RANK_TOL = 1e-10
MAX_DIM = 8

# Components below this magnitude are treated as zero when fixing the phase
# of an eigenvector (unit vectors always have a component >= 1/sqrt(MAX_DIM)).
_PHASE_ATOL = 1e-12


def require_hermitian(a: np.ndarray, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate that ``a`` is square and Hermitian within ``atol``.

    Returns the input as a complex128 array. Raises NonHermitianError if
    max |a[i,j] - conj(a[j,i])| exceeds ``atol``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    dev = np.abs(a - a.conj().T).max()
    if dev > atol:
        raise NonHermitianError(f"matrix deviates from Hermitian symmetry by {dev:.3e} > {atol:.1e}")
    return a


def hermitianize(a: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (a + a^dagger) / 2."""
    a = np.asarray(a, dtype=complex)
    return (a + a.conj().T) / 2


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a, dtype=complex).conj().T


def outer(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rank-1 operator |u><v|."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise DimensionMismatchError(f"outer expects two equal-length vectors, got {u.shape} and {v.shape}")
    return np.outer(u, v.conj())


def matmul(*factors: np.ndarray) -> np.ndarray:
    """Chain matrix product with explicit shape validation."""
    if not factors:
        raise DimensionMismatchError("matmul needs at least one factor")
    result = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        f = np.asarray(f, dtype=complex)
        if result.shape[-1] != f.shape[0]:
            raise DimensionMismatchError(f"cannot multiply shapes {result.shape} and {f.shape}")
        result = result @ f
    return result


def trace(a: np.ndarray) -> complex:
    """Matrix trace as a Python complex."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"trace expects a square matrix, got shape {a.shape}")
    return complex(np.trace(a))


def real_trace(a: np.ndarray, atol: float = HERMITIAN_ATOL) -> float:
    """Trace of a product of Hermitian factors: real up to numerical residue.

    Raises NonHermitianError when the imaginary residue exceeds ``atol``,
    which signals that an operand was not actually Hermitian.
    """
    t = trace(a)
    if abs(t.imag) > atol:
        raise NonHermitianError(f"trace has imaginary residue {t.imag:.3e} > {atol:.1e}")
    return t.real


@dataclass(frozen=True)
class EigenDecomposition:
    """Full eigensystem of a Hermitian matrix.

    eigenvalues: real, sorted ascending.
    eigenvectors: orthonormal columns, column i paired with eigenvalues[i],
    each phased so its first non-negligible component is real positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first component with |x| > _PHASE_ATOL is real positive."""
    fixed = vectors.copy()
    for j in range(fixed.shape[1]):
        col = fixed[:, j]
        idx = np.flatnonzero(np.abs(col) > _PHASE_ATOL)
        if idx.size:
            lead = col[idx[0]]
            fixed[:, j] = col * (lead.conjugate() / abs(lead))
    return fixed


def hermitian_eig(a: np.ndarray, atol: float = HERMITIAN_ATOL) -> EigenDecomposition:
    """Eigen-decompose a Hermitian matrix of dimension <= 8.

    Backed by LAPACK via numpy.linalg.eigh; eigenvalues come back ascending
    and the phase convention above makes the eigenvectors deterministic for
    non-degenerate spectra.
    """
    a = require_hermitian(a, atol)
    if a.shape[0] > MAX_DIM:
        raise DimensionMismatchError(f"kernel is limited to dim <= {MAX_DIM}, got {a.shape[0]}")
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(str(exc)) from exc
    return EigenDecomposition(np.asarray(w, dtype=float), _fix_phases(np.asarray(v, dtype=complex)))


def is_psd(a: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff the minimal eigenvalue of Hermitian ``a`` is >= -tol."""
    dec = hermitian_eig(a)
    return bool(dec.eigenvalues[0] >= -tol)


def pinv_sqrt(a: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Pseudo-inverse square root of a Hermitian PSD matrix.

    Eigenvalues above rank_tol * lambda_max form the support and are mapped to
    1/sqrt(lambda); the rest are annihilated, so B @ a @ B is the orthogonal
    projector onto the support of ``a``.

    Raises NegativeEigenvalueError when the minimal eigenvalue is below
    -1e-10 * lambda_max (the matrix is not PSD within tolerance).
    """
    if rank_tol <= 0:
        raise DomainError(f"rank_tol must be positive, got {rank_tol}")
    dec = hermitian_eig(a)
    w = dec.eigenvalues
    lam_max = max(w[-1], 0.0)
    neg_floor = -1e-10 * (lam_max if lam_max > 0 else 1.0)
    if w[0] < neg_floor:
        raise NegativeEigenvalueError(f"minimal eigenvalue {w[0]:.3e} below PSD tolerance {neg_floor:.3e}")
    support = w > rank_tol * lam_max
    inv_sqrt = np.zeros_like(w)
    inv_sqrt[support] = 1.0 / np.sqrt(w[support])
    v = dec.eigenvectors
    return hermitianize((v * inv_sqrt) @ v.conj().T)
