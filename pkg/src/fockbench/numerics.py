"""Small dense complex-matrix kernels shared by every module."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg


@dataclass(frozen=True)
class Tolerances:
    """Central tolerance record for the verification suites.

    algebraic covers identities that hold exactly up to rounding (CCR,
    strength-matrix products, adjointness).  exponential covers anything
    routed through a matrix exponential or a unitarity check, where the
    conditioning is slightly worse.  hermiticity guards input validation.
    """

    algebraic: float = 1e-10
    exponential: float = 1e-9
    hermiticity: float = 1e-10


DEFAULT_TOLERANCES = Tolerances()


def as_cmatrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def as_cvector(v) -> np.ndarray:
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1:
        raise ValueError(f"expected a vector, got array of shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError("vector entries must be finite")
    return a


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermiticity_defect(m) -> float:
    """Max entrywise |M - M^dag|."""
    m = np.asarray(m)
    return max_abs(m - m.conj().T)


def unitarity_defect(u) -> float:
    u = np.asarray(u)
    return max_abs(u.conj().T @ u - np.eye(u.shape[0]))


def hermitian_eig(m, tol: float = DEFAULT_TOLERANCES.hermiticity):
    """Spectral decomposition M = U diag(w) U^dag of a Hermitian matrix.

    Eigenvalues come back ascending.  Each eigenvector phase is fixed so
    that its first component of non-negligible modulus is real and
    positive, which makes repeated runs reproducible.

    Raises ValueError when max |M - M^dag| exceeds `tol`.
    """
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(
            f"matrix is not Hermitian: max |M - M^dag| = {defect:.3e} "
            f"exceeds tolerance {tol:.1e}"
        )
    w, u = np.linalg.eigh(m)
    u = np.array(u, dtype=complex)
    for j in range(u.shape[1]):
        col = u[:, j]
        nonzero = np.flatnonzero(np.abs(col) > 1e-12)
        if nonzero.size:
            pivot = col[nonzero[0]]
            u[:, j] = col * (abs(pivot) / pivot)
    return w, u


def mat_exp(m) -> np.ndarray:
    """Matrix exponential (scaling-and-squaring Pade, via scipy)."""
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return scipy.linalg.expm(m)


def commutator(a, b) -> np.ndarray:
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError(f"commutator needs equal square shapes, got {a.shape} and {b.shape}")
    return a @ b - b @ a


def principal_log_unitary(u, tol: float = 1e-8) -> np.ndarray:
    """Hermitian H with U = exp(-iH), via the principal matrix logarithm."""
    u = as_cmatrix(u)
    defect = unitarity_defect(u)
    if defect > tol:
        raise ValueError(f"matrix is not unitary: defect {defect:.3e} exceeds {tol:.1e}")
    h = 1j * scipy.linalg.logm(u)
    return 0.5 * (h + h.conj().T)


# -- random draws used by the verification suites -----------------------------

def random_cvector(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return scale * v / np.sqrt(2.0)


def random_cmatrix(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return scale * m / np.sqrt(2.0)


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    a = random_cmatrix(rng, dim, scale)
    return 0.5 * (a + a.conj().T)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(random_cmatrix(rng, dim))
    d = np.diagonal(r)
    return q * (d / np.abs(d))
