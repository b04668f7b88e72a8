"""Discretized quantum stochastic calculus on slot tensor spaces.

The time axis is cut into slots; each slot carries its own truncated Fock
space and the global space is their tensor product.  Integrator increments
on slot j are

    alpha dt * 1 + a^dag(ket sqrt(dt)) + conservation(op) + a(bra sqrt(dt)),

embedded as the identity on every other slot.  The sqrt(dt) amplitude
scaling matches the L2 mass of a step function on the slot; the
conservation part carries no dt factor.

Three evaluation engines coexist:

* a dense global engine (exponential in slot count, used as the oracle),
* a slot-factorized engine for matrix elements between exponential vectors
  (linear in slot count, exact for integrands built from earlier
  increments, agrees with the dense engine to rounding),
* a continuum-limit engine that integrates the scalar hierarchy of the
  fundamental formulas slot-exactly and represents the limit object that
  grid refinement converges to.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import serialize
from .fock import FockBasis, annihilation, conservation, creation, exponential_vector
from .ito_algebra import ItoMatrix, StrengthFunction, circ, dagger, nu
from .numerics import as_cvector

DEFAULT_DIM_LIMIT = 20_000


class TimeGrid:
    """Strictly increasing partition 0 = t_0 < t_1 < ... < t_n = T."""

    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("need at least two grid points")
        if pts[0] != 0.0:
            raise ValueError("grid must start at 0")
        widths = np.diff(pts)
        if np.any(widths <= 0):
            raise ValueError("grid points must be strictly increasing")
        self.points = pts
        self.widths = widths

    @staticmethod
    def uniform(horizon: float, n_slots: int) -> "TimeGrid":
        if n_slots < 1:
            raise ValueError("need at least one slot")
        return TimeGrid(np.linspace(0.0, horizon, n_slots + 1))

    @property
    def n_slots(self) -> int:
        return len(self.widths)

    @property
    def horizon(self) -> float:
        return float(self.points[-1])

    def index_of(self, t: float, tol: float = 1e-9) -> int:
        hits = np.flatnonzero(np.abs(self.points - t) <= tol)
        if hits.size == 0:
            raise ValueError(f"t={t} is not a grid point of {self.points}")
        return int(hits[0])

    def same_points(self, other: "TimeGrid") -> bool:
        return len(self.points) == len(other.points) and bool(
            np.allclose(self.points, other.points, atol=1e-12)
        )

    def __repr__(self):
        return f"TimeGrid(n_slots={self.n_slots}, horizon={self.horizon})"


class StepFunction:
    """Piecewise-constant C^d-valued function on a grid."""

    def __init__(self, grid: TimeGrid, values):
        values = np.asarray(values, dtype=complex)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != grid.n_slots:
            raise ValueError(f"need {grid.n_slots} slot values, got {values.shape[0]}")
        self.grid = grid
        self.values = values

    @staticmethod
    def zero(grid: TimeGrid, modes: int) -> "StepFunction":
        return StepFunction(grid, np.zeros((grid.n_slots, modes), dtype=complex))

    @staticmethod
    def constant(grid: TimeGrid, value) -> "StepFunction":
        value = as_cvector(value)
        return StepFunction(grid, np.tile(value, (grid.n_slots, 1)))

    @property
    def modes(self) -> int:
        return self.values.shape[1]

    def restricted(self, start: int, stop: int) -> "StepFunction":
        """Same step function with slots outside [start, stop) zeroed."""
        vals = np.zeros_like(self.values)
        vals[start:stop] = self.values[start:stop]
        return StepFunction(self.grid, vals)

    def norm(self) -> float:
        mass = np.sum(np.abs(self.values) ** 2 * self.grid.widths[:, None])
        return float(np.sqrt(mass.real))


def inner_step(f: StepFunction, g: StepFunction) -> complex:
    """Scalar product sum_j <f_j|g_j> dt_j, antilinear in f."""
    if not f.grid.same_points(g.grid):
        raise ValueError("step functions live on different grids")
    return complex(np.sum(np.einsum("jk,jk->j", f.values.conj(), g.values) * f.grid.widths))


class SlotSpace:
    """Tensor product of one truncated Fock space per slot."""

    def __init__(self, grid: TimeGrid, modes: int, slot_cutoff: int,
                 dim_limit: int = DEFAULT_DIM_LIMIT):
        self.grid = grid
        self.basis = FockBasis(modes, slot_cutoff)
        self.dim_limit = dim_limit
        if dim_limit is not None and self.global_dim > dim_limit:
            raise ValueError(
                f"global dimension {self.global_dim} exceeds the configured "
                f"limit {dim_limit}"
            )

    @property
    def modes(self) -> int:
        return self.basis.modes

    @property
    def slot_dim(self) -> int:
        return self.basis.dim

    @property
    def n_slots(self) -> int:
        return self.grid.n_slots

    @property
    def global_dim(self) -> int:
        return self.slot_dim ** self.n_slots

    def __repr__(self):
        return (f"SlotSpace(n_slots={self.n_slots}, slot_dim={self.slot_dim}, "
                f"global_dim={self.global_dim})")


def slot_exponential(basis: FockBasis, value, dt: float) -> np.ndarray:
    """Truncated exponential vector of the slot amplitude value*sqrt(dt)."""
    return exponential_vector(basis, np.sqrt(dt) * as_cvector(value)).coeffs


def embed_exponential(space: SlotSpace, f: StepFunction) -> np.ndarray:
    """Tensor product over slots of the per-slot exponential vectors."""
    if not space.grid.same_points(f.grid):
        raise ValueError("step function lives on a different grid")
    out = np.ones(1, dtype=complex)
    for j in range(space.n_slots):
        out = np.kron(out, slot_exponential(space.basis, f.values[j], space.grid.widths[j]))
    return out


def increment_slot_matrix(basis: FockBasis, n: ItoMatrix, dt: float) -> np.ndarray:
    """Single-slot matrix of the integrator increment for strength N."""
    if n.dim != basis.modes:
        raise ValueError(f"strength dim {n.dim} does not match {basis.modes} modes")
    root = np.sqrt(dt)
    mat = n.alpha * dt * np.eye(basis.dim, dtype=complex)
    mat += creation(basis, root * n.ket).matrix
    mat += conservation(basis, n.op).matrix
    mat += annihilation(basis, root * n.bra).matrix
    return mat


def apply_slot_matrix(space: SlotSpace, vec: np.ndarray, j: int, mat: np.ndarray) -> np.ndarray:
    """Apply a single-slot matrix on slot j of a global vector."""
    shape = (space.slot_dim,) * space.n_slots
    ten = vec.reshape(shape)
    ten = np.moveaxis(np.tensordot(mat, ten, axes=([1], [j])), 0, j)
    return np.ascontiguousarray(ten).reshape(-1)


def apply_increment(space: SlotSpace, vec: np.ndarray, j: int, n: ItoMatrix) -> np.ndarray:
    mat = increment_slot_matrix(space.basis, n, space.grid.widths[j])
    return apply_slot_matrix(space, vec, j, mat)


def slot_matrix_embedded(space: SlotSpace, j: int, mat: np.ndarray) -> np.ndarray:
    """Global dense matrix acting as `mat` on slot j and identity elsewhere."""
    _check_dense_size(space)
    out = np.ones((1, 1), dtype=complex)
    eye = np.eye(space.slot_dim, dtype=complex)
    for k in range(space.n_slots):
        out = np.kron(out, mat if k == j else eye)
    return out


def increment_matrix(space: SlotSpace, j: int, n: ItoMatrix) -> np.ndarray:
    """Global dense matrix of the slot-j increment for strength N."""
    return slot_matrix_embedded(
        space, j, increment_slot_matrix(space.basis, n, space.grid.widths[j])
    )


def _check_dense_size(space: SlotSpace, hard_cap: int = 4096):
    if space.global_dim > hard_cap:
        raise ValueError(
            f"global dimension {space.global_dim} too large to materialize a dense matrix"
        )


# -- adapted processes ---------------------------------------------------------

class AdaptedStepProcess:
    """Simple adapted process: at grid index j it acts on slot factors < j only."""

    def apply(self, space: SlotSpace, j: int, vec: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def matrix(self, space: SlotSpace, j: int) -> np.ndarray:
        _check_dense_size(space)
        dim = space.global_dim
        out = np.zeros((dim, dim), dtype=complex)
        basis_vec = np.zeros(dim, dtype=complex)
        for col in range(dim):
            basis_vec[:] = 0.0
            basis_vec[col] = 1.0
            out[:, col] = self.apply(space, j, basis_vec)
        return out


class IdentityProcess(AdaptedStepProcess):
    def apply(self, space, j, vec):
        return np.array(vec, dtype=complex)


class ScalarProcess(AdaptedStepProcess):
    """Deterministic scalar step process c(t) * identity."""

    def __init__(self, values):
        self.values = np.asarray(values, dtype=complex)
        if self.values.ndim != 1:
            raise ValueError("scalar process needs one value per slot")

    def value_at(self, j: int) -> complex:
        return complex(self.values[min(j, len(self.values) - 1)])

    def apply(self, space, j, vec):
        return self.value_at(j) * np.asarray(vec, dtype=complex)


class IntegralProcess(AdaptedStepProcess):
    """Stochastic integral of an earlier adapted process against a strength.

    X(t_j) = sum_{k<j} L(t_k) (increment of slot k); the clamp to grid
    points realizes the min(t, t_{k+1}) truncation of the defining sum.
    """

    def __init__(self, integrand: AdaptedStepProcess, strength: StrengthFunction):
        self.integrand = integrand
        self.strength = strength

    def apply(self, space, j, vec):
        out = np.zeros_like(np.asarray(vec, dtype=complex))
        for k in range(j):
            out += self.integrand.apply(space, k, apply_increment(space, vec, k, self.strength[k]))
        return out


class SlotLocalProcess(AdaptedStepProcess):
    """Arbitrary slot-local dense factors; dense-oracle engine only.

    factors[j] is a list of (slot index, slot matrix) pairs describing
    L(t_j); every factor must act strictly before slot j.
    """

    def __init__(self, factors):
        self.factors = list(factors)
        for j, fac in enumerate(self.factors):
            for slot, _ in fac:
                if slot >= j:
                    raise ValueError(
                        f"factor on slot {slot} violates adaptedness at grid index {j}"
                    )

    def apply(self, space, j, vec):
        out = np.array(vec, dtype=complex)
        fac = self.factors[min(j, len(self.factors) - 1)]
        for slot, mat in fac:
            out = apply_slot_matrix(space, out, slot, mat)
        return out


def apply_stochastic_integral(space: SlotSpace, integrand: AdaptedStepProcess,
                              strength: StrengthFunction, t: float,
                              vec: np.ndarray) -> np.ndarray:
    """Apply the integral clamped at grid time t to a global vector."""
    return IntegralProcess(integrand, strength).apply(space, space.grid.index_of(t), vec)


def stochastic_integral_matrix(space: SlotSpace, integrand: AdaptedStepProcess,
                               strength: StrengthFunction, t: float) -> np.ndarray:
    """Dense global matrix of the integral at grid time t; oracle path only."""
    return IntegralProcess(integrand, strength).matrix(space, space.grid.index_of(t))


def matrix_element(space: SlotSpace, process: AdaptedStepProcess,
                   f: StepFunction, g: StepFunction, t_index: int) -> complex:
    """Dense <e(f)| process(t) |e(g)> on the global slot space."""
    e_f = embed_exponential(space, f)
    e_g = embed_exponential(space, g)
    return complex(np.vdot(e_f, process.apply(space, t_index, e_g)))


# -- fundamental-formula checks ------------------------------------------------

@dataclass
class FundamentalReport:
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    grid_points: list
    slot_cutoff: int
    rhs_two_term: complex | None = None
    abs_err_two_term: float | None = None
    slope_estimate: float | None = None

    def to_dict(self) -> dict:
        doc = {
            "lhs": serialize.complex_to_pairs(self.lhs),
            "rhs": serialize.complex_to_pairs(self.rhs),
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "grid": list(map(float, self.grid_points)),
            "cutoffs": {"slot_cutoff": self.slot_cutoff},
        }
        if self.rhs_two_term is not None:
            doc["rhs_two_term"] = serialize.complex_to_pairs(self.rhs_two_term)
            doc["abs_err_two_term"] = self.abs_err_two_term
        if self.slope_estimate is not None:
            doc["slope_estimate"] = self.slope_estimate
        return doc


def _relative(err: float, ref: complex) -> float:
    scale = max(abs(ref), 1e-300)
    return err / scale


def check_first_fundamental(space: SlotSpace, integrand: AdaptedStepProcess,
                            strength: StrengthFunction, f: StepFunction,
                            g: StepFunction, t: float) -> FundamentalReport:
    """Dense matrix element of the integral against the exact slot-wise sum.

    The right side integrates the scalar form against the dense matrix
    elements of the integrand; for step data this integration is exact, so
    the reported discrepancy is attributable to per-slot truncation alone.
    """
    idx = space.grid.index_of(t)
    e_f = embed_exponential(space, f)
    e_g = embed_exponential(space, g)
    x_vec = np.zeros_like(e_g)
    rhs = 0.0 + 0.0j
    for k in range(idx):
        x_vec += integrand.apply(space, k, apply_increment(space, e_g, k, strength[k]))
        scalar = nu(strength[k], f.values[k], g.values[k])
        rhs += scalar * np.vdot(e_f, integrand.apply(space, k, e_g)) * space.grid.widths[k]
    lhs = complex(np.vdot(e_f, x_vec))
    abs_err = abs(lhs - rhs)
    return FundamentalReport(
        lhs=lhs, rhs=complex(rhs), abs_err=abs_err, rel_err=_relative(abs_err, rhs),
        grid_points=list(space.grid.points), slot_cutoff=space.basis.cutoff,
    )


def check_second_fundamental(space: SlotSpace, integrand1: AdaptedStepProcess,
                             strength1: StrengthFunction, integrand2: AdaptedStepProcess,
                             strength2: StrengthFunction, f: StepFunction,
                             g: StepFunction, t: float) -> FundamentalReport:
    """Pairing of two integrals against the slot-exact three-term right side.

    Within a slot the pairing is quadratic in time, so the right side is
    integrated exactly: left-endpoint terms plus the dt^2 cross term.  The
    two-term variant drops every contribution of the composed strength
    (the product-differential correction) and is reported alongside to
    show the correction is not optional.
    """
    idx = space.grid.index_of(t)
    e_f = embed_exponential(space, f)
    e_g = embed_exponential(space, g)
    x1 = np.zeros_like(e_f)
    x2 = np.zeros_like(e_g)
    rhs_three = 0.0 + 0.0j
    rhs_two = 0.0 + 0.0j
    for k in range(idx):
        dt = space.grid.widths[k]
        l1 = integrand1.apply(space, k, e_f)
        l2 = integrand2.apply(space, k, e_g)
        h1 = np.vdot(l1, x2)
        h2 = np.vdot(x1, l2)
        c = np.vdot(l1, l2)
        n1d = dagger(strength1[k])
        nu1d = nu(n1d, f.values[k], g.values[k])
        nu2 = nu(strength2[k], f.values[k], g.values[k])
        nu12 = nu(circ(n1d, strength2[k]), f.values[k], g.values[k])
        base = dt * (nu1d * h1 + nu2 * h2) + dt * dt * nu1d * nu2 * c
        rhs_three += base + dt * nu12 * c
        rhs_two += base
        x1 += integrand1.apply(space, k, apply_increment(space, e_f, k, strength1[k]))
        x2 += integrand2.apply(space, k, apply_increment(space, e_g, k, strength2[k]))
    lhs = complex(np.vdot(x1, x2))
    abs_err = abs(lhs - rhs_three)
    return FundamentalReport(
        lhs=lhs, rhs=complex(rhs_three), abs_err=abs_err,
        rel_err=_relative(abs_err, rhs_three),
        grid_points=list(space.grid.points), slot_cutoff=space.basis.cutoff,
        rhs_two_term=complex(rhs_two), abs_err_two_term=abs(lhs - rhs_two),
    )


def ito_product_table(n1: ItoMatrix, n2: ItoMatrix) -> ItoMatrix:
    """Strength of the product differential dX1 dX2 (thin wrapper over circ)."""
    return circ(n1, n2)


# -- slot-factorized engine ----------------------------------------------------

_ID_KEY = "identity"


def _node_key(proc: AdaptedStepProcess):
    if isinstance(proc, (IdentityProcess, ScalarProcess)):
        return _ID_KEY
    return id(proc)


def _integral_nodes(proc: AdaptedStepProcess):
    if isinstance(proc, IntegralProcess):
        return _integral_nodes(proc.integrand) + [proc]
    if isinstance(proc, (IdentityProcess, ScalarProcess)):
        return []
    raise TypeError(
        f"{type(proc).__name__} is only supported by the dense oracle engine"
    )


def _scalar_coeff(proc: AdaptedStepProcess, j: int) -> complex:
    if isinstance(proc, ScalarProcess):
        return proc.value_at(j)
    return 1.0 + 0.0j


class _SlotData:
    """Per-slot truncated vectors and increment matrices, built lazily."""

    def __init__(self, grid: TimeGrid, basis: FockBasis, f: StepFunction, g: StepFunction):
        self.grid = grid
        self.basis = basis
        self.ef = [slot_exponential(basis, f.values[j], grid.widths[j])
                   for j in range(grid.n_slots)]
        self.eg = [slot_exponential(basis, g.values[j], grid.widths[j])
                   for j in range(grid.n_slots)]
        self.rho = [complex(np.vdot(self.ef[j], self.eg[j])) for j in range(grid.n_slots)]
        self._mats = {}

    def mat(self, strength: StrengthFunction, j: int) -> np.ndarray:
        key = (id(strength), j)
        if key not in self._mats:
            self._mats[key] = increment_slot_matrix(self.basis, strength[j], self.grid.widths[j])
        return self._mats[key]


def factorized_pair_element(grid: TimeGrid, basis: FockBasis,
                            left: AdaptedStepProcess, right: AdaptedStepProcess,
                            f: StepFunction, g: StepFunction,
                            t_index: int | None = None) -> complex:
    """<left(t) e(f) | right(t) e(g)> via the slot factorization.

    Equal to the dense-engine value up to rounding, but linear in the slot
    count, so it remains usable far beyond the dense dimension cap.
    """
    if t_index is None:
        t_index = grid.n_slots
    data = _SlotData(grid, basis, f, g)
    nodes_l = _integral_nodes(left)
    nodes_r = _integral_nodes(right)
    keys_l = [_ID_KEY] + [id(p) for p in nodes_l]
    keys_r = [_ID_KEY] + [id(p) for p in nodes_r]
    table = {(a, b): (1.0 + 0.0j if a == _ID_KEY and b == _ID_KEY else 0.0 + 0.0j)
             for a in keys_l for b in keys_r}

    def lookup(proc_a, proc_b, j, snapshot):
        coeff = np.conj(_scalar_coeff(proc_a, j)) * _scalar_coeff(proc_b, j)
        return coeff * snapshot[(_node_key(proc_a), _node_key(proc_b))]

    by_key_l = {id(p): p for p in nodes_l}
    by_key_r = {id(p): p for p in nodes_r}
    for j in range(t_index):
        snapshot = dict(table)
        for a in keys_l:
            for b in keys_r:
                new = snapshot[(a, b)] * data.rho[j]
                proc_a = by_key_l.get(a)
                proc_b = by_key_r.get(b)
                if proc_b is not None:
                    mb = data.mat(proc_b.strength, j)
                    w = np.vdot(data.ef[j], mb @ data.eg[j])
                    new += lookup(proc_a or IdentityProcess(), proc_b.integrand, j, snapshot) * w
                if proc_a is not None:
                    ma = data.mat(proc_a.strength, j)
                    wbar = np.vdot(ma @ data.ef[j], data.eg[j])
                    new += lookup(proc_a.integrand, proc_b or IdentityProcess(), j, snapshot) * wbar
                if proc_a is not None and proc_b is not None:
                    v = np.vdot(data.mat(proc_a.strength, j) @ data.ef[j],
                                data.mat(proc_b.strength, j) @ data.eg[j])
                    new += lookup(proc_a.integrand, proc_b.integrand, j, snapshot) * v
                table[(a, b)] = new
    coeff = np.conj(_scalar_coeff(left, t_index)) * _scalar_coeff(right, t_index)
    value = coeff * table[(_node_key(left), _node_key(right))]
    suffix = 1.0 + 0.0j
    for j in range(t_index, grid.n_slots):
        suffix *= data.rho[j]
    return complex(value * suffix)


def factorized_matrix_element(grid: TimeGrid, basis: FockBasis,
                              process: AdaptedStepProcess, f: StepFunction,
                              g: StepFunction, t_index: int | None = None) -> complex:
    return factorized_pair_element(grid, basis, IdentityProcess(), process, f, g, t_index)


# -- continuum-limit engine ----------------------------------------------------

def _depth(proc: AdaptedStepProcess) -> int:
    if isinstance(proc, IntegralProcess):
        return 1 + _depth(proc.integrand)
    return 0


def continuum_pair_element(grid: TimeGrid, left: AdaptedStepProcess,
                           right: AdaptedStepProcess, f: StepFunction,
                           g: StepFunction, t_index: int | None = None,
                           drop_correction: bool = False) -> complex:
    """Limit value of <left(t) e(f)|right(t) e(g)> for the continuous integrals.

    Integral nodes are read as genuine time integrals rather than their
    left-endpoint discretizations.  Within each slot the scalar hierarchy
    of the fundamental formulas has piecewise-constant coefficients, so the
    pair values are polynomials in time there and propagate exactly.  With
    drop_correction the composed-strength term is omitted, which is the
    two-term variant that fails to converge.
    """
    if t_index is None:
        t_index = grid.n_slots
    base = complex(np.exp(inner_step(f, g)))
    nodes_l = _integral_nodes(left)
    nodes_r = _integral_nodes(right)
    keys_l = [_ID_KEY] + [id(p) for p in nodes_l]
    keys_r = [_ID_KEY] + [id(p) for p in nodes_r]
    by_key_l = {id(p): p for p in nodes_l}
    by_key_r = {id(p): p for p in nodes_r}
    values = {(a, b): (base if a == _ID_KEY and b == _ID_KEY else 0.0 + 0.0j)
              for a in keys_l for b in keys_r}

    def poly_of(proc_a, proc_b, j, polys):
        coeff = np.conj(_scalar_coeff(proc_a, j)) * _scalar_coeff(proc_b, j)
        p = polys[(_node_key(proc_a), _node_key(proc_b))]
        return [coeff * c for c in p]

    pair_order = sorted(
        [(a, b) for a in keys_l for b in keys_r],
        key=lambda ab: (_depth_of(ab[0], by_key_l) + _depth_of(ab[1], by_key_r)),
    )
    for j in range(t_index):
        dt = grid.widths[j]
        fj = f.values[j]
        gj = g.values[j]
        polys = {}
        for a, b in pair_order:
            proc_a = by_key_l.get(a)
            proc_b = by_key_r.get(b)
            if proc_a is None and proc_b is None:
                polys[(a, b)] = [values[(a, b)]]
                continue
            deriv = np.zeros(1, dtype=complex)
            if proc_a is not None:
                n1d = dagger(proc_a.strength[j])
                rate = nu(n1d, fj, gj)
                term = poly_of(proc_a.integrand, proc_b or IdentityProcess(), j, polys)
                deriv = npoly.polyadd(deriv, rate * np.asarray(term))
            if proc_b is not None:
                rate = nu(proc_b.strength[j], fj, gj)
                term = poly_of(proc_a or IdentityProcess(), proc_b.integrand, j, polys)
                deriv = npoly.polyadd(deriv, rate * np.asarray(term))
            if proc_a is not None and proc_b is not None and not drop_correction:
                rate = nu(circ(dagger(proc_a.strength[j]), proc_b.strength[j]), fj, gj)
                term = poly_of(proc_a.integrand, proc_b.integrand, j, polys)
                deriv = npoly.polyadd(deriv, rate * np.asarray(term))
            polys[(a, b)] = list(npoly.polyint(deriv, k=[values[(a, b)]]))
        for key, p in polys.items():
            values[key] = complex(npoly.polyval(dt, np.asarray(p)))
    coeff = np.conj(_scalar_coeff(left, t_index)) * _scalar_coeff(right, t_index)
    return complex(coeff * values[(_node_key(left), _node_key(right))])


def _depth_of(key, by_key) -> int:
    if key == _ID_KEY:
        return 0
    return _depth(by_key[key])


def continuum_matrix_element(grid: TimeGrid, process: AdaptedStepProcess,
                             f: StepFunction, g: StepFunction,
                             t_index: int | None = None) -> complex:
    return continuum_pair_element(grid, IdentityProcess(), process, f, g, t_index)


# -- grid-refinement studies ---------------------------------------------------

@dataclass
class ConvergenceRow:
    n_slots: int
    dt_max: float
    err_three_term: float
    err_two_term: float | None = None

    def to_dict(self):
        doc = {"n_slots": self.n_slots, "dt_max": self.dt_max,
               "err_three_term": self.err_three_term}
        if self.err_two_term is not None:
            doc["err_two_term"] = self.err_two_term
        return doc


@dataclass
class ConvergenceStudy:
    rows: list
    slope: float

    def to_dict(self):
        return {"rows": [r.to_dict() for r in self.rows], "slope_estimate": self.slope}


def fitted_slope(rows) -> float:
    dts = np.log([r.dt_max for r in rows])
    errs = np.log([max(r.err_three_term, 1e-300) for r in rows])
    return float(np.polyfit(dts, errs, 1)[0])


def _iterated_process(grid: TimeGrid, inner: ItoMatrix, outer: ItoMatrix):
    inner_strength = StrengthFunction.constant(grid, inner)
    outer_strength = StrengthFunction.constant(grid, outer)
    level1 = IntegralProcess(IdentityProcess(), inner_strength)
    return IntegralProcess(level1, outer_strength)


def refinement_study_first(horizon: float, slot_counts, modes: int, slot_cutoff: int,
                           f_value, g_value, inner: ItoMatrix,
                           outer: ItoMatrix) -> ConvergenceStudy:
    """First-formula convergence for an iterated integrand.

    The discretized matrix element (slot-factorized engine) is compared
    with the continuum-limit value at each grid; the gap shrinks linearly
    in the largest slot width.
    """
    basis = FockBasis(modes, slot_cutoff)
    rows = []
    for n_slots in slot_counts:
        grid = TimeGrid.uniform(horizon, n_slots)
        f = StepFunction.constant(grid, f_value)
        g = StepFunction.constant(grid, g_value)
        proc = _iterated_process(grid, inner, outer)
        disc = factorized_matrix_element(grid, basis, proc, f, g)
        cont = continuum_matrix_element(grid, proc, f, g)
        rows.append(ConvergenceRow(n_slots, float(np.max(grid.widths)), abs(disc - cont)))
    return ConvergenceStudy(rows, fitted_slope(rows))


def refinement_study_second(horizon: float, slot_counts, modes: int, slot_cutoff: int,
                            f_value, g_value, inner1: ItoMatrix, outer1: ItoMatrix,
                            inner2: ItoMatrix, outer2: ItoMatrix) -> ConvergenceStudy:
    """Second-formula convergence for iterated integrands.

    err_three_term compares the discretized pairing with the continuum
    three-term value and shrinks at first order; err_two_term compares it
    with the correction-dropped value and stalls at the size of the
    composed-strength contribution.
    """
    basis = FockBasis(modes, slot_cutoff)
    rows = []
    for n_slots in slot_counts:
        grid = TimeGrid.uniform(horizon, n_slots)
        f = StepFunction.constant(grid, f_value)
        g = StepFunction.constant(grid, g_value)
        p1 = _iterated_process(grid, inner1, outer1)
        p2 = _iterated_process(grid, inner2, outer2)
        disc = factorized_pair_element(grid, basis, p1, p2, f, g)
        cont3 = continuum_pair_element(grid, p1, p2, f, g)
        cont2 = continuum_pair_element(grid, p1, p2, f, g, drop_correction=True)
        rows.append(ConvergenceRow(n_slots, float(np.max(grid.widths)),
                                   abs(disc - cont3), abs(disc - cont2)))
    return ConvergenceStudy(rows, fitted_slope(rows))
