"""Strength-matrix algebra for quantum stochastic differentials.

A strength matrix is the (1+d) x (1+d) block array

    [ alpha   <bra| ]
    [ |ket>   op    ]

acting on C + C^d.  The bra block is stored as a plain vector with the
convention "row = conjugate transpose of the stored vector"; every formula
below is written against that convention.  The composition `circ` encodes
the product of stochastic differentials, and `nu` is the scalar form that
drives both fundamental formulas.
"""

from dataclasses import dataclass

import numpy as np

from . import serialize
from .numerics import as_cmatrix, as_cvector


@dataclass
class ItoMatrix:
    alpha: complex
    bra: np.ndarray
    ket: np.ndarray
    op: np.ndarray

    def __post_init__(self):
        self.alpha = complex(self.alpha)
        self.bra = as_cvector(self.bra)
        self.ket = as_cvector(self.ket)
        self.op = as_cmatrix(self.op)
        d = self.bra.shape[0]
        if self.ket.shape != (d,) or self.op.shape != (d, d):
            raise ValueError(
                f"inconsistent block dimensions: bra {self.bra.shape}, "
                f"ket {self.ket.shape}, op {self.op.shape}"
            )

    @property
    def dim(self) -> int:
        return self.bra.shape[0]

    @staticmethod
    def zero(dim: int) -> "ItoMatrix":
        return ItoMatrix(0.0, np.zeros(dim), np.zeros(dim), np.zeros((dim, dim)))

    @staticmethod
    def time_only(alpha, dim: int) -> "ItoMatrix":
        n = ItoMatrix.zero(dim)
        return ItoMatrix(alpha, n.bra, n.ket, n.op)

    def __add__(self, other: "ItoMatrix") -> "ItoMatrix":
        _check_dim(self, other)
        return ItoMatrix(self.alpha + other.alpha, self.bra + other.bra,
                         self.ket + other.ket, self.op + other.op)

    def scale(self, c) -> "ItoMatrix":
        return ItoMatrix(c * self.alpha, np.conj(c) * self.bra, c * self.ket, c * self.op)

    def max_abs(self) -> float:
        return max(abs(self.alpha), float(np.max(np.abs(self.bra), initial=0.0)),
                   float(np.max(np.abs(self.ket), initial=0.0)),
                   float(np.max(np.abs(self.op), initial=0.0)))


def _check_dim(n1: ItoMatrix, n2: ItoMatrix):
    if n1.dim != n2.dim:
        raise ValueError(f"dimension mismatch: {n1.dim} vs {n2.dim}")


def circ(n1: ItoMatrix, n2: ItoMatrix) -> ItoMatrix:
    """Composition of stochastic differentials.

    alpha -> <bra1|ket2>, bra -> row <bra1|op2, ket -> op1|ket2>,
    op -> op1 op2.  The input alphas never appear in the output.
    """
    _check_dim(n1, n2)
    return ItoMatrix(
        alpha=np.vdot(n1.bra, n2.ket),
        bra=n2.op.conj().T @ n1.bra,
        ket=n1.op @ n2.ket,
        op=n1.op @ n2.op,
    )


def dagger(n: ItoMatrix) -> ItoMatrix:
    """Block adjoint: conjugate alpha, swap bra and ket, adjoint op."""
    return ItoMatrix(np.conj(n.alpha), n.ket.copy(), n.bra.copy(), n.op.conj().T)


def nu(n: ItoMatrix, f_val, g_val) -> complex:
    """Scalar form alpha + <f|ket> + <f|op|g> + <bra|g>."""
    f_val = as_cvector(f_val)
    g_val = as_cvector(g_val)
    if f_val.shape != (n.dim,) or g_val.shape != (n.dim,):
        raise ValueError(
            f"argument dimensions {f_val.shape}, {g_val.shape} do not match strength dim {n.dim}"
        )
    return complex(
        n.alpha + np.vdot(f_val, n.ket) + np.vdot(f_val, n.op @ g_val) + np.vdot(n.bra, g_val)
    )


def to_block(n: ItoMatrix) -> np.ndarray:
    """Full (1+d) x (1+d) matrix; top row carries the conjugated bra vector."""
    d = n.dim
    block = np.zeros((1 + d, 1 + d), dtype=complex)
    block[0, 0] = n.alpha
    block[0, 1:] = n.bra.conj()
    block[1:, 0] = n.ket
    block[1:, 1:] = n.op
    return block


def from_block(block) -> ItoMatrix:
    block = as_cmatrix(block)
    return ItoMatrix(block[0, 0], block[0, 1:].conj(), block[1:, 0], block[1:, 1:])


def circ_sandwich(n1: ItoMatrix, n2: ItoMatrix) -> ItoMatrix:
    """Oracle route for `circ`: full block product N1 diag(0, I) N2."""
    _check_dim(n1, n2)
    mask = np.eye(1 + n1.dim, dtype=complex)
    mask[0, 0] = 0.0
    return from_block(to_block(n1) @ mask @ to_block(n2))


def ito_to_document(n: ItoMatrix) -> dict:
    return {
        "alpha": serialize.complex_to_pairs(n.alpha),
        "bra": serialize.complex_to_pairs(n.bra),
        "ket": serialize.complex_to_pairs(n.ket),
        "op": serialize.complex_to_pairs(n.op),
    }


def ito_from_document(doc) -> ItoMatrix:
    return ItoMatrix(
        complex(serialize.pairs_to_complex(doc["alpha"])),
        serialize.pairs_to_complex(doc["bra"]),
        serialize.pairs_to_complex(doc["ket"]),
        serialize.pairs_to_complex(doc["op"]),
    )


class StrengthFunction:
    """Piecewise-constant strength: one ItoMatrix per grid slot.

    Step data makes the scalar-form time integral an exact slot-wise sum,
    which removes quadrature error from the verification suites.
    """

    def __init__(self, grid, values):
        values = list(values)
        if len(values) != grid.n_slots:
            raise ValueError(f"need {grid.n_slots} slot values, got {len(values)}")
        dims = {n.dim for n in values}
        if len(dims) > 1:
            raise ValueError("slot strengths must share one dimension")
        self.grid = grid
        self.values = values

    @staticmethod
    def constant(grid, n: ItoMatrix) -> "StrengthFunction":
        return StrengthFunction(grid, [n] * grid.n_slots)

    @property
    def dim(self) -> int:
        return self.values[0].dim

    def dagger(self) -> "StrengthFunction":
        return StrengthFunction(self.grid, [dagger(n) for n in self.values])

    def circ(self, other: "StrengthFunction") -> "StrengthFunction":
        if self.grid is not other.grid and not self.grid.same_points(other.grid):
            raise ValueError("strengths live on different grids")
        return StrengthFunction(self.grid, [circ(a, b) for a, b in zip(self.values, other.values)])

    def __getitem__(self, j: int) -> ItoMatrix:
        return self.values[j]


def nu_integral(strength: StrengthFunction, f, g, t: float) -> complex:
    """Exact integral of nu over [0, t] for step data (slot-wise sum)."""
    grid = strength.grid
    if f.grid is not grid and not grid.same_points(f.grid):
        raise ValueError("f lives on a different grid")
    if g.grid is not grid and not grid.same_points(g.grid):
        raise ValueError("g lives on a different grid")
    idx = grid.index_of(t)
    total = 0.0 + 0.0j
    for j in range(idx):
        total += nu(strength[j], f.values[j], g.values[j]) * grid.widths[j]
    return complex(total)
