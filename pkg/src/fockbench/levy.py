"""Weyl processes and the classical Levy processes they execute in vacuum.

A piecewise-constant path (phi(t), U(t)) through the euclidean group of
C^d drives a Weyl process whose matrix elements between exponential
vectors close in a four-integral exponent.  Substituting U = exp(ixH) and
coupling phi to a square-integrable psi yields, in the vacuum state,
classical Levy processes: a compound-Poisson family (type I) and a
compensated family with an optional Gaussian component (type II).  The
jump measure is atomic here because H acts on a finite-dimensional space.
"""

from dataclasses import dataclass

import numpy as np

from . import serialize
from .serialize import derive_seed
from .fock import FockBasis, FockOperator, annihilation, conservation, creation, weyl_pair
from .ito_algebra import ItoMatrix, StrengthFunction, nu
from .numerics import (
    as_cmatrix,
    as_cvector,
    hermitian_eig,
    hermiticity_defect,
    mat_exp,
    unitarity_defect,
)
from .qsc import StepFunction, TimeGrid, inner_step, slot_exponential

ZERO_ATOM_THRESHOLD = 1e-9


class EuclideanPath:
    """Piecewise-constant (phi(t), U(t)) with every U_j unitary."""

    def __init__(self, grid: TimeGrid, phis, unitaries, tol: float = 1e-10):
        phis = np.asarray(phis, dtype=complex)
        if phis.ndim == 1:
            phis = phis[:, None]
        unitaries = np.asarray(unitaries, dtype=complex)
        if unitaries.ndim == 2:
            unitaries = unitaries[None, :, :]
        if phis.shape[0] != grid.n_slots or unitaries.shape[0] != grid.n_slots:
            raise ValueError("need one (phi, U) pair per slot")
        for j in range(grid.n_slots):
            defect = unitarity_defect(unitaries[j])
            if defect > tol:
                raise ValueError(f"U at slot {j} is not unitary: defect {defect:.3e}")
        self.grid = grid
        self.phis = phis
        self.unitaries = unitaries

    @staticmethod
    def constant(grid: TimeGrid, phi, u_op) -> "EuclideanPath":
        phi = as_cvector(phi)
        u_op = as_cmatrix(u_op)
        return EuclideanPath(grid, np.tile(phi, (grid.n_slots, 1)),
                             np.tile(u_op, (grid.n_slots, 1, 1)))

    @property
    def modes(self) -> int:
        return self.phis.shape[1]


def window_exponent(f: StepFunction, g: StepFunction, a_index: int, b_index: int,
                    path: EuclideanPath) -> complex:
    """Inside-window part of the matrix-element exponent over [t_a, t_b]."""
    total = 0.0 + 0.0j
    for j in range(a_index, b_index):
        dt = path.grid.widths[j]
        phi = path.phis[j]
        u_op = path.unitaries[j]
        fj = f.values[j]
        gj = g.values[j]
        total += dt * (
            -0.5 * np.vdot(phi, phi)
            + np.vdot(fj, phi)
            + np.vdot(fj, u_op @ gj)
            - np.vdot(phi, u_op @ gj)
        )
    return complex(total)


def weyl_matrix_element(f: StepFunction, g: StepFunction, a: float, b: float,
                        path: EuclideanPath) -> complex:
    """<e(f)| W([a, b]) |e(g)> for grid times a < b, exact for step data.

    The exponent collects, per slot inside the window, the path terms
    -|phi|^2/2 + <f|phi> + <f|U|g> - <phi|U|g>, and outside the window the
    bare overlap terms <f|g>.
    """
    a_index = path.grid.index_of(a)
    b_index = path.grid.index_of(b)
    if not a_index < b_index:
        raise ValueError(f"window [{a}, {b}] is not increasing on the grid")
    total = window_exponent(f, g, a_index, b_index, path)
    for j in list(range(0, a_index)) + list(range(b_index, path.grid.n_slots)):
        total += path.grid.widths[j] * np.vdot(f.values[j], g.values[j])
    return complex(np.exp(total))


def weyl_matrix_element_dense(f: StepFunction, g: StepFunction, a: float, b: float,
                              path: EuclideanPath, slot_cutoff: int = 10) -> complex:
    """Oracle route: product of per-slot truncated Weyl-pair matrix elements."""
    a_index = path.grid.index_of(a)
    b_index = path.grid.index_of(b)
    basis = FockBasis(path.modes, slot_cutoff)
    total = 1.0 + 0.0j
    for j in range(path.grid.n_slots):
        dt = path.grid.widths[j]
        ef = slot_exponential(basis, f.values[j], dt)
        eg = slot_exponential(basis, g.values[j], dt)
        if a_index <= j < b_index:
            w = weyl_pair(basis, np.sqrt(dt) * path.phis[j], path.unitaries[j])
            total *= np.vdot(ef, w.matrix @ eg)
        else:
            total *= np.vdot(ef, eg)
    return complex(total)


def weyl_generator(path: EuclideanPath) -> StrengthFunction:
    """Strength of the Weyl-process differential equation.

    Per slot: alpha = -|phi|^2/2, ket = phi, op = U - 1, and the stored bra
    vector is -U^dag phi so that the bra row reproduces -<phi|U exactly.
    """
    values = []
    d = path.modes
    for j in range(path.grid.n_slots):
        phi = path.phis[j]
        u_op = path.unitaries[j]
        values.append(ItoMatrix(
            alpha=-0.5 * np.vdot(phi, phi),
            bra=-(u_op.conj().T @ phi),
            ket=phi.copy(),
            op=u_op - np.eye(d),
        ))
    return StrengthFunction(path.grid, values)


def solve_weyl_qsde(f: StepFunction, g: StepFunction, path: EuclideanPath,
                    scheme: str = "exact") -> np.ndarray:
    """Matrix-element trajectory of the Weyl process between e(f) and e(g).

    Starts from the full overlap <e(f)|e(g)> and advances slot-wise with
    the scalar-form rate; the "exact" scheme multiplies by exp(rate * dt)
    per slot (exact for step data), the "euler" scheme by (1 + rate * dt).
    The endpoint of the exact scheme equals the closed-form matrix element
    over the whole horizon.
    """
    strength = weyl_generator(path)
    grid = path.grid
    traj = np.empty(grid.n_slots + 1, dtype=complex)
    traj[0] = np.exp(inner_step(f, g))
    for j in range(grid.n_slots):
        rate = nu(strength[j], f.values[j], g.values[j])
        dt = grid.widths[j]
        if scheme == "exact":
            step = np.exp(rate * dt)
        elif scheme == "euler":
            step = 1.0 + rate * dt
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
        traj[j + 1] = traj[j] * step
    return traj


# -- Levy strength data and atomic jump measures --------------------------------

class LevyStrengthData:
    """Piecewise-constant (psi(t), H(t)) with every H_j Hermitian."""

    def __init__(self, grid: TimeGrid, psis, hams, tol: float = 1e-10):
        psis = np.asarray(psis, dtype=complex)
        if psis.ndim == 1:
            psis = psis[:, None]
        hams = np.asarray(hams, dtype=complex)
        if hams.ndim == 2:
            hams = hams[None, :, :]
        if psis.shape[0] != grid.n_slots or hams.shape[0] != grid.n_slots:
            raise ValueError("need one (psi, H) pair per slot")
        for j in range(grid.n_slots):
            defect = hermiticity_defect(hams[j])
            if defect > tol:
                raise ValueError(f"H at slot {j} is not Hermitian: defect {defect:.3e}")
        self.grid = grid
        self.psis = psis
        self.hams = hams

    @staticmethod
    def homogeneous(grid: TimeGrid, psi, ham) -> "LevyStrengthData":
        psi = as_cvector(psi)
        ham = as_cmatrix(ham)
        return LevyStrengthData(grid, np.tile(psi, (grid.n_slots, 1)),
                                np.tile(ham, (grid.n_slots, 1, 1)))

    @property
    def modes(self) -> int:
        return self.psis.shape[1]


@dataclass
class LevyAtoms:
    """Per-slot atomic jump measure: (jump sizes, nonnegative weights)."""

    grid: TimeGrid
    jumps: list
    weights: list

    @staticmethod
    def from_data(data: LevyStrengthData) -> "LevyAtoms":
        jumps = []
        weights = []
        for j in range(data.grid.n_slots):
            eigenvalues, vectors = hermitian_eig(data.hams[j])
            w = np.abs(vectors.conj().T @ data.psis[j]) ** 2
            jumps.append(np.real(eigenvalues))
            weights.append(w)
        return LevyAtoms(data.grid, jumps, weights)

    def total_weight(self, j: int) -> float:
        return float(np.sum(self.weights[j]))


def _cf_integrand_type1(x, y):
    return np.exp(1j * np.multiply.outer(x, y)) - 1.0


def _cf_integrand_type2(x, y):
    """(exp(ixy) - 1 - ixy) / y^2 with the y -> 0 limit -x^2/2 built in."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xy = np.multiply.outer(x, y)
    small = np.abs(y) < ZERO_ATOM_THRESHOLD
    ysq = np.where(small, 1.0, y * y)
    vals = (np.exp(1j * xy) - 1.0 - 1j * xy) / ysq
    limit = -0.5 * np.multiply.outer(x * x, np.ones_like(y))
    return np.where(small, limit, vals)


def _atoms_of(data) -> LevyAtoms:
    return data if isinstance(data, LevyAtoms) else LevyAtoms.from_data(data)


def type1_cf(x, t: float, data) -> np.ndarray:
    """Characteristic function of the type-I observable at time t (grid point).

    exp of the slot-exact sum of dt * sum_k w_k (exp(ix y_k) - 1).
    """
    atoms = _atoms_of(data)
    idx = atoms.grid.index_of(t)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    exponent = np.zeros(x.shape, dtype=complex)
    for j in range(idx):
        contrib = _cf_integrand_type1(x, atoms.jumps[j]) @ atoms.weights[j]
        exponent += atoms.grid.widths[j] * contrib
    out = np.exp(exponent)
    return out if out.size > 1 else complex(out[0])


def type2_cf(x, t: float, data) -> np.ndarray:
    """Characteristic function of the type-II observable at time t (grid point)."""
    atoms = _atoms_of(data)
    idx = atoms.grid.index_of(t)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    exponent = np.zeros(x.shape, dtype=complex)
    for j in range(idx):
        contrib = _cf_integrand_type2(x, atoms.jumps[j]) @ atoms.weights[j]
        exponent += atoms.grid.widths[j] * contrib
    out = np.exp(exponent)
    return out if out.size > 1 else complex(out[0])


def type1_exponent_rate(x, psi, ham) -> np.ndarray:
    """Per-unit-time CF exponent <psi|(exp(ixH) - 1)|psi> via atoms."""
    eigenvalues, vectors = hermitian_eig(as_cmatrix(ham))
    w = np.abs(vectors.conj().T @ as_cvector(psi)) ** 2
    return _cf_integrand_type1(np.asarray(x, dtype=float), np.real(eigenvalues)) @ w


def type2_exponent_rate(x, psi, ham) -> np.ndarray:
    eigenvalues, vectors = hermitian_eig(as_cmatrix(ham))
    w = np.abs(vectors.conj().T @ as_cvector(psi)) ** 2
    return _cf_integrand_type2(np.asarray(x, dtype=float), np.real(eigenvalues)) @ w


def type1_generator(x: float, data: LevyStrengthData) -> StrengthFunction:
    """Strength N_x of the type-I exponential: blocks built from exp(ixH) - 1."""
    values = []
    d = data.modes
    eye = np.eye(d)
    for j in range(data.grid.n_slots):
        psi = data.psis[j]
        e_op = mat_exp(1j * x * data.hams[j]) - eye
        values.append(ItoMatrix(
            alpha=np.vdot(psi, e_op @ psi),
            bra=e_op.conj().T @ psi,
            ket=e_op @ psi,
            op=e_op,
        ))
    return StrengthFunction(data.grid, values)


def vacuum_endpoint(strength: StrengthFunction) -> complex:
    """Vacuum matrix element of the driven exponential at the horizon.

    The scalar-form rate at f = g = 0 is the alpha block, so the endpoint
    is exp of the slot-wise alpha integral.
    """
    total = sum(n.alpha * dt for n, dt in zip(strength.values, strength.grid.widths))
    return complex(np.exp(total))


# -- bounded single-slot observables --------------------------------------------

MIN_OPERATOR_CUTOFF = 12


def bounded_type1_operator(basis: FockBasis, psi, ham, t: float) -> FockOperator:
    """Truncated type-I observable for constant (psi, H) over [0, t].

    t <psi|H|psi> + a^dag(H psi sqrt(t)) + conservation(H) + a(H psi sqrt(t)).
    """
    psi, ham = _check_operator_inputs(basis, psi, ham)
    h_psi = np.sqrt(t) * (ham @ psi)
    scalar = t * np.real(np.vdot(psi, ham @ psi))
    mat = scalar * np.eye(basis.dim)
    mat = mat + creation(basis, h_psi).matrix + conservation(basis, ham).matrix
    mat = mat + annihilation(basis, h_psi).matrix
    return FockOperator(basis, mat)


def bounded_type2_operator(basis: FockBasis, psi, ham, t: float) -> FockOperator:
    """Truncated type-II observable: a^dag(psi sqrt(t)) + conservation(H) + a(psi sqrt(t))."""
    psi, ham = _check_operator_inputs(basis, psi, ham)
    scaled = np.sqrt(t) * psi
    mat = creation(basis, scaled).matrix + conservation(basis, ham).matrix
    mat = mat + annihilation(basis, scaled).matrix
    return FockOperator(basis, mat)


def _check_operator_inputs(basis: FockBasis, psi, ham):
    psi = as_cvector(psi)
    ham = as_cmatrix(ham)
    if basis.cutoff < MIN_OPERATOR_CUTOFF:
        raise ValueError(
            f"operator-route cutoff {basis.cutoff} is below the supported "
            f"minimum {MIN_OPERATOR_CUTOFF}; raise the cutoff instead of guessing"
        )
    defect = hermiticity_defect(ham)
    if defect > 1e-10:
        raise ValueError(f"H is not Hermitian: defect {defect:.3e}")
    return psi, ham


def operator_vacuum_cf(op: FockOperator, xs, x_limit: float = 2.0,
                       enforce_domain: bool = True) -> np.ndarray:
    """Vacuum characteristic function x -> <e(0)|exp(ixZ)|e(0)>.

    The default domain guard |x| <= 2 keeps the coherent displacement well
    inside the truncation; pass enforce_domain=False to override.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if enforce_domain and np.any(np.abs(xs) > x_limit + 1e-12):
        raise ValueError(f"|x| exceeds the supported operator-route domain {x_limit}")
    vac = op.basis.vacuum().coeffs
    values = np.empty(xs.shape, dtype=complex)
    for i, x in enumerate(xs):
        values[i] = np.vdot(vac, mat_exp(1j * x * op.matrix) @ vac)
    return values


# -- classical samplers ----------------------------------------------------------

def sample_type1(data, t: float, seed: int, size: int = 1) -> np.ndarray:
    """Draws of the type-I marginal at time t: per-slot compound Poisson.

    Atom (y_k, w_k) on a slot of width dt contributes y_k * Poisson(w_k dt).
    Deterministic given the seed.
    """
    atoms = _atoms_of(data)
    idx = atoms.grid.index_of(t)
    rng = np.random.default_rng(seed)
    out = np.zeros(size)
    for j in range(idx):
        dt = atoms.grid.widths[j]
        for y, w in zip(atoms.jumps[j], atoms.weights[j]):
            if w <= 0.0:
                continue
            out += y * rng.poisson(w * dt, size=size)
    return out


def sample_type2(data, t: float, seed: int, size: int = 1) -> np.ndarray:
    """Draws of the type-II marginal at time t.

    Zero atoms contribute a centered Gaussian of variance w dt; an atom at
    y != 0 contributes a compensated Poisson with rate w/y^2, jump y and
    drift -w dt / y.
    """
    atoms = _atoms_of(data)
    idx = atoms.grid.index_of(t)
    rng = np.random.default_rng(seed)
    out = np.zeros(size)
    for j in range(idx):
        dt = atoms.grid.widths[j]
        for y, w in zip(atoms.jumps[j], atoms.weights[j]):
            if w <= 0.0:
                continue
            if abs(y) < ZERO_ATOM_THRESHOLD:
                out += rng.normal(0.0, np.sqrt(w * dt), size=size)
            else:
                rate = w / (y * y)
                out += y * rng.poisson(rate * dt, size=size) - w * dt / y
    return out


def empirical_cf(samples, xs) -> np.ndarray:
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    samples = np.asarray(samples, dtype=float)
    return np.exp(1j * np.outer(xs, samples)).mean(axis=1)


@dataclass
class CombinedProcess:
    """Independent sum of a type-I and a type-II component plus a drift.

    The closing construction: the two components live on separate mode
    spaces, so their observables commute and samples simply add, while the
    characteristic functions multiply.
    """

    type1_data: LevyStrengthData
    type2_data: LevyStrengthData
    drift: float = 0.0

    def cf(self, x, t: float) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        values = (np.asarray(type1_cf(x, t, self.type1_data))
                  * np.asarray(type2_cf(x, t, self.type2_data))
                  * np.exp(1j * x * self.drift * t))
        return values if values.size > 1 else complex(values[0])

    def sample(self, t: float, seed: int, size: int = 1) -> np.ndarray:
        seed1 = derive_seed(seed, "combine-type1")
        seed2 = derive_seed(seed, "combine-type2")
        return (sample_type1(self.type1_data, t, seed1, size)
                + sample_type2(self.type2_data, t, seed2, size)
                + self.drift * t)


def combine(type1_data: LevyStrengthData, type2_data: LevyStrengthData,
            drift: float = 0.0) -> CombinedProcess:
    return CombinedProcess(type1_data, type2_data, drift)


# -- characteristic-function tables ----------------------------------------------

@dataclass
class CFTable:
    """Aligned characteristic-function samples with a provenance tag."""

    xs: np.ndarray
    t: float
    values: np.ndarray
    provenance: str

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.values = np.asarray(self.values, dtype=complex)
        if self.xs.shape != self.values.shape:
            raise ValueError("x grid and values must align")
        if self.provenance not in ("analytic", "operator", "empirical"):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def validate(self, statistical_tol: float = 0.05):
        if np.any(np.abs(self.values) > 1.0 + statistical_tol):
            raise ValueError("characteristic function exceeds modulus 1 beyond tolerance")
        zeros = np.flatnonzero(np.abs(self.xs) < 1e-12)
        for i in zeros:
            if abs(self.values[i] - 1.0) > statistical_tol:
                raise ValueError("characteristic function must equal 1 at x = 0")

    def rows(self):
        for x, v in zip(self.xs, self.values):
            yield [serialize.format_float(x), serialize.format_float(v.real),
                   serialize.format_float(v.imag), self.provenance]

    def to_dict(self) -> dict:
        return {
            "x": [float(x) for x in self.xs],
            "t": self.t,
            "values": serialize.complex_to_pairs(self.values),
            "provenance": self.provenance,
        }


def sup_distance(a: CFTable, b: CFTable) -> float:
    if a.xs.shape != b.xs.shape or not np.allclose(a.xs, b.xs):
        raise ValueError("tables are not aligned on one x grid")
    return float(np.max(np.abs(a.values - b.values)))
