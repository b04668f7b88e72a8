"""Truncated boson Fock space over C^d.

The state space is spanned by occupation-number multi-indices
(m_1, ..., m_d) with total particle number at most `cutoff`.  Creation
drops any amplitude that would leave the top sector (hard truncation),
which keeps the annihilation and creation matrices exact mutual adjoints
and makes the commutation relations exact on every sector at least two
levels below the cutoff.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import serialize
from .numerics import (
    DEFAULT_TOLERANCES,
    as_cmatrix,
    as_cvector,
    hermiticity_defect,
    mat_exp,
    principal_log_unitary,
    unitarity_defect,
)


class FockBasis:
    """Occupation-number basis for `modes` bosonic modes, total number <= cutoff.

    States are ordered by total particle number, then lexicographically,
    so the vacuum (0, ..., 0) always sits at index 0.
    """

    def __init__(self, modes: int, cutoff: int):
        if modes < 1:
            raise ValueError("need at least one mode")
        if cutoff < 0:
            raise ValueError("cutoff must be nonnegative")
        self.modes = modes
        self.cutoff = cutoff
        states = []
        for total in range(cutoff + 1):
            states.extend(sorted(_compositions(total, modes)))
        self.states = states
        self.index = {s: i for i, s in enumerate(states)}
        self.occupations = np.array(states, dtype=int)
        self.totals = self.occupations.sum(axis=1)

    @property
    def dim(self) -> int:
        return len(self.states)

    def vacuum(self) -> "FockVector":
        coeffs = np.zeros(self.dim, dtype=complex)
        coeffs[0] = 1.0
        return FockVector(self, coeffs)

    def sector_projector(self, max_total: int) -> np.ndarray:
        """Diagonal projector onto sectors with total particle number <= max_total."""
        return np.diag((self.totals <= max_total).astype(complex))

    def guarded_projector(self, margin: int = 2) -> np.ndarray:
        """Projector onto the guarded subspace (sectors <= cutoff - margin)."""
        return self.sector_projector(self.cutoff - margin)

    def __eq__(self, other):
        return (
            isinstance(other, FockBasis)
            and self.modes == other.modes
            and self.cutoff == other.cutoff
        )

    def __hash__(self):
        return hash((self.modes, self.cutoff))

    def __repr__(self):
        return f"FockBasis(modes={self.modes}, cutoff={self.cutoff}, dim={self.dim})"


def _compositions(total, modes):
    if modes == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, modes - 1):
            yield (first,) + rest


@dataclass
class FockVector:
    basis: FockBasis
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = as_cvector(self.coeffs)
        if self.coeffs.shape != (self.basis.dim,):
            raise ValueError(
                f"coefficient length {self.coeffs.shape} does not match basis dim {self.basis.dim}"
            )

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass
class FockOperator:
    basis: FockBasis
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = as_cmatrix(self.matrix)
        d = self.basis.dim
        if self.matrix.shape != (d, d):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match basis dim {d}"
            )

    def dag(self) -> "FockOperator":
        return FockOperator(self.basis, self.matrix.conj().T)

    def apply(self, vec: FockVector) -> FockVector:
        _check_same_basis(self.basis, vec.basis)
        return FockVector(vec.basis, self.matrix @ vec.coeffs)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            _check_same_basis(self.basis, other.basis)
            return FockOperator(self.basis, self.matrix @ other.matrix)
        if isinstance(other, FockVector):
            return self.apply(other)
        return NotImplemented


def _check_same_basis(a: FockBasis, b: FockBasis):
    if a != b:
        raise ValueError(f"basis mismatch: {a!r} vs {b!r}")


def inner(x: FockVector, y: FockVector) -> complex:
    """Scalar product, antilinear in x and linear in y."""
    _check_same_basis(x.basis, y.basis)
    return complex(np.vdot(x.coeffs, y.coeffs))


def exponential_vector(basis: FockBasis, u) -> FockVector:
    """Coherent series vector with coefficient prod_k u_k^{m_k} / sqrt(m_k!) at m."""
    u = _check_mode_vector(basis, u)
    occ = basis.occupations
    with np.errstate(invalid="ignore"):
        powers = np.where(occ > 0, u[None, :] ** occ, 1.0 + 0j)
    log_fact = np.vectorize(lambda n: math.lgamma(n + 1))(occ)
    coeffs = powers.prod(axis=1) / np.exp(0.5 * log_fact.sum(axis=1))
    return FockVector(basis, coeffs)


def _check_mode_vector(basis: FockBasis, u) -> np.ndarray:
    u = as_cvector(u)
    if u.shape != (basis.modes,):
        raise ValueError(f"expected a vector of {basis.modes} mode amplitudes, got {u.shape}")
    return u


def _mode_lowering(basis: FockBasis, k: int) -> np.ndarray:
    """Single-mode lowering matrix: <m - e_k| a_k |m> = sqrt(m_k)."""
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for i, state in enumerate(basis.states):
        if state[k] == 0:
            continue
        target = state[:k] + (state[k] - 1,) + state[k + 1:]
        mat[basis.index[target], i] = math.sqrt(state[k])
    return mat


def annihilation(basis: FockBasis, u) -> FockOperator:
    """a(u) = sum_k conj(u_k) a_k; antilinear in u and kills the vacuum."""
    u = _check_mode_vector(basis, u)
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for k in range(basis.modes):
        if u[k] != 0:
            mat += np.conj(u[k]) * _mode_lowering(basis, k)
    return FockOperator(basis, mat)


def creation(basis: FockBasis, u) -> FockOperator:
    """a^dag(u), the exact matrix adjoint of a(u); linear in u.

    Amplitude that would land past the cutoff sector is dropped.
    """
    return annihilation(basis, u).dag()


def conservation(basis: FockBasis, k_op) -> FockOperator:
    """Conservation operator: sum_{k,l} K_{kl} (mode-k raising)(mode-l lowering).

    Preserves every particle-number sector and is linear in K.
    """
    k_op = as_cmatrix(k_op)
    if k_op.shape != (basis.modes, basis.modes):
        raise ValueError(f"expected a {basis.modes}x{basis.modes} matrix, got {k_op.shape}")
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    for i, state in enumerate(basis.states):
        for l in range(basis.modes):
            if state[l] == 0:
                continue
            for k in range(basis.modes):
                if k_op[k, l] == 0:
                    continue
                if k == l:
                    mat[i, i] += k_op[k, k] * state[k]
                else:
                    target = list(state)
                    target[l] -= 1
                    target[k] += 1
                    j = basis.index[tuple(target)]
                    mat[j, i] += k_op[k, l] * math.sqrt((state[k] + 1) * state[l])
    return FockOperator(basis, mat)


def number_operator(basis: FockBasis) -> FockOperator:
    return FockOperator(basis, np.diag(basis.totals.astype(complex)))


def second_quantization(basis: FockBasis, t_op, contraction_tol: float = 1e-12) -> FockOperator:
    """Functorial lift of a contraction T, block-diagonal over number sectors.

    The n-particle block is the restriction of the n-fold product of T to
    the symmetric subspace.  It is assembled column by column through the
    intertwining of T-transformed raising operators with the lift, which
    reproduces the symmetric-power restriction exactly on every sector.
    """
    t_op = as_cmatrix(t_op)
    if t_op.shape != (basis.modes, basis.modes):
        raise ValueError(f"expected a {basis.modes}x{basis.modes} matrix, got {t_op.shape}")
    top = np.linalg.norm(t_op, 2)
    if top > 1.0 + contraction_tol:
        raise ValueError(f"largest singular value {top:.12f} exceeds 1; not a contraction")
    raising = [_mode_lowering(basis, k).conj().T for k in range(basis.modes)]
    transformed = [
        sum(t_op[j, k] * raising[j] for j in range(basis.modes))
        for k in range(basis.modes)
    ]
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    mat[0, 0] = 1.0
    for i, state in enumerate(basis.states):
        if i == 0:
            continue
        k = next(k for k in range(basis.modes) if state[k] > 0)
        parent = state[:k] + (state[k] - 1,) + state[k + 1:]
        mat[:, i] = transformed[k] @ mat[:, basis.index[parent]] / math.sqrt(state[k])
    return FockOperator(basis, mat)


def second_quantization_via_generator(basis: FockBasis, u_op) -> FockOperator:
    """Lift of a unitary U computed as exp(-i * conservation(H)), U = exp(-iH).

    Independent of the sector-by-sector path; the two constructions are
    required to agree and are cross-checked in the test suite.
    """
    h = principal_log_unitary(as_cmatrix(u_op))
    return FockOperator(basis, mat_exp(-1j * conservation(basis, h).matrix))


def momentum(basis: FockBasis, u) -> FockOperator:
    """Field observable i(a^dag(u) - a(u)); Hermitian by construction."""
    a = annihilation(basis, u).matrix
    return FockOperator(basis, 1j * (a.conj().T - a))


def weyl(basis: FockBasis, u) -> FockOperator:
    """Weyl (displacement) operator exp(a^dag(u) - a(u)).

    Computed by the matrix exponential of the truncated generator; the
    translation action on exponential vectors serves as a test oracle only,
    because that action is inconsistent with truncation near the cutoff.
    """
    a = annihilation(basis, u).matrix
    return FockOperator(basis, mat_exp(a.conj().T - a))


def weyl_pair(basis: FockBasis, u, u_op) -> FockOperator:
    """Euclidean-pair operator W(u) Gamma(U) for unitary U."""
    u_op = as_cmatrix(u_op)
    defect = unitarity_defect(u_op)
    if defect > 1e-8:
        raise ValueError(f"U is not unitary: defect {defect:.3e}")
    return weyl(basis, u) @ second_quantization(basis, u_op)


def dilated_conservation_cf(basis: FockBasis, u, h_op, t: float) -> complex:
    """Vacuum expectation <e(0)| W(-u) exp(it conservation(H)) W(u) |e(0)>.

    For Hermitian H this is the characteristic function (in t) of an
    infinitely divisible law whose jump measure is the spectral measure of
    H compressed by u.
    """
    h_op = as_cmatrix(h_op)
    defect = hermiticity_defect(h_op)
    if defect > DEFAULT_TOLERANCES.hermiticity:
        raise ValueError(f"H is not Hermitian: defect {defect:.3e}")
    u = _check_mode_vector(basis, u)
    vac = basis.vacuum().coeffs
    wu = weyl(basis, u).matrix
    wminus = weyl(basis, -u).matrix
    evolution = mat_exp(1j * t * conservation(basis, h_op).matrix)
    return complex(np.vdot(vac, wminus @ (evolution @ (wu @ vac))))


# -- serialization -------------------------------------------------------------

def basis_descriptor(basis: FockBasis) -> dict:
    return {"modes": basis.modes, "cutoff": basis.cutoff}


def basis_from_descriptor(doc) -> FockBasis:
    return FockBasis(int(doc["modes"]), int(doc["cutoff"]))


def vector_to_document(vec: FockVector) -> dict:
    return {
        "basis": basis_descriptor(vec.basis),
        "coeffs": serialize.complex_to_pairs(vec.coeffs),
    }


def vector_from_document(doc) -> FockVector:
    return FockVector(basis_from_descriptor(doc["basis"]), serialize.pairs_to_complex(doc["coeffs"]))


def operator_to_document(op: FockOperator) -> dict:
    return {
        "basis": basis_descriptor(op.basis),
        "matrix": serialize.complex_to_pairs(op.matrix),
    }


def operator_from_document(doc) -> FockOperator:
    return FockOperator(basis_from_descriptor(doc["basis"]), serialize.pairs_to_complex(doc["matrix"]))


def weyl_action_residual(basis: FockBasis, u, v) -> float:
    """Norm of W(u)e(v) minus the translated-and-scaled exponential vector.

    This is the truncation figure of merit for the Weyl construction; it
    decreases as the cutoff grows.
    """
    u = _check_mode_vector(basis, u)
    v = _check_mode_vector(basis, v)
    lhs = weyl(basis, u).matrix @ exponential_vector(basis, v).coeffs
    scale = np.exp(-0.5 * np.vdot(u, u) - np.vdot(u, v))
    rhs = scale * exponential_vector(basis, u + v).coeffs
    return float(np.linalg.norm(lhs - rhs))
