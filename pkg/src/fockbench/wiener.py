"""Monte-Carlo side of the Fock/Wiener-space correspondence.

Stochastic exponentials exp(int u dB - 1/2 int u^2 dt) of real step
functions play the role of exponential vectors; their moments reproduce
the exponential-vector overlaps, and restriction to an initial window
matches conditioning on the Brownian path up to that time.

Gaussian increments come from a counter-based Philox stream mapped through
the inverse normal CDF, so identical seeds give bit-identical paths.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .qsc import TimeGrid


class BrownianGrid:
    """A batch of Brownian increment paths over a uniform grid."""

    def __init__(self, grid: TimeGrid, increments: np.ndarray):
        increments = np.asarray(increments, dtype=float)
        if increments.ndim != 2 or increments.shape[1] != grid.n_slots:
            raise ValueError("increments must be (n_paths, n_slots)")
        self.grid = grid
        self.increments = increments

    @property
    def n_paths(self) -> int:
        return self.increments.shape[0]

    @staticmethod
    def simulate(grid: TimeGrid, n_paths: int, seed: int) -> "BrownianGrid":
        """Increment draws: Philox(key=seed) uniforms in (0, 1), inverse-CDF
        normals, scaled by sqrt(dt)."""
        rng = np.random.Generator(np.random.Philox(key=seed))
        ticks = rng.integers(1, 2 ** 53, size=(n_paths, grid.n_slots))
        normals = ndtri(ticks / float(2 ** 53))
        return BrownianGrid(grid, normals * np.sqrt(grid.widths))


def wiener_exponential(u, paths: BrownianGrid) -> np.ndarray:
    """Stochastic exponential exp(sum u_j dB_j - 1/2 sum u_j^2 dt_j) per path."""
    u = np.asarray(u, dtype=float)
    if u.shape != (paths.grid.n_slots,):
        raise ValueError(f"u must supply one real value per slot, got {u.shape}")
    ito_term = paths.increments @ u
    compensator = 0.5 * np.sum(u * u * paths.grid.widths)
    return np.exp(ito_term - compensator)


@dataclass
class MonteCarloReport:
    n_paths: int
    estimate: float
    target: float
    std_error: float
    z_score: float

    def to_dict(self):
        return {
            "n_paths": self.n_paths,
            "estimate": self.estimate,
            "target": self.target,
            "std_error": self.std_error,
            "z_score": self.z_score,
        }


def _mc_report(samples: np.ndarray, target: float) -> MonteCarloReport:
    n = samples.size
    estimate = float(np.mean(samples))
    std_error = float(np.std(samples, ddof=1) / np.sqrt(n))
    z = (estimate - target) / std_error if std_error > 0 else 0.0
    return MonteCarloReport(n, estimate, float(target), std_error, float(z))


def mean_exponential(u, paths: BrownianGrid) -> MonteCarloReport:
    """E exp-martingale check: the stochastic exponential has mean one."""
    return _mc_report(wiener_exponential(u, paths), 1.0)


def product_expectation(u, v, paths: BrownianGrid) -> MonteCarloReport:
    """E[e~(u) e~(v)] against exp(<u|v>)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    samples = wiener_exponential(u, paths) * wiener_exponential(v, paths)
    target = np.exp(np.sum(u * v * paths.grid.widths))
    return _mc_report(samples, target)


def second_moment(u, paths: BrownianGrid) -> MonteCarloReport:
    """E[e~(u)^2] against exp(|u|^2), via e~(u)^2 = e~(2u) exp(|u|^2)."""
    u = np.asarray(u, dtype=float)
    samples = wiener_exponential(u, paths) ** 2
    target = np.exp(np.sum(u * u * paths.grid.widths))
    return _mc_report(samples, target)


def split_product_residual(u, t_index: int, paths: BrownianGrid) -> float:
    """Max per-path residual of e~(u) = e~(u 1_[0,t]) * e~(u 1_(t,T])."""
    u = np.asarray(u, dtype=float)
    head = np.where(np.arange(paths.grid.n_slots) < t_index, u, 0.0)
    tail = u - head
    full = wiener_exponential(u, paths)
    prod = wiener_exponential(head, paths) * wiener_exponential(tail, paths)
    return float(np.max(np.abs(full - prod) / np.maximum(np.abs(full), 1e-300)))


@dataclass
class ConditionalReport:
    n_paths: int
    max_split_residual: float
    mean_report: MonteCarloReport

    def to_dict(self):
        return {
            "n_paths": self.n_paths,
            "max_split_residual": self.max_split_residual,
            "mean": self.mean_report.to_dict(),
        }


def conditional_projection_check(u, t_index: int, paths: BrownianGrid) -> ConditionalReport:
    """Conditioning on the path up to t_index replaces the future factor by 1.

    For step u the identity is algebraic: the conditional expectation of
    the future stochastic exponential is exactly one, so e~(u) conditioned
    equals e~(u restricted).  The report carries the per-path split-product
    residual and a Monte-Carlo check that the future factor has mean one.
    """
    u = np.asarray(u, dtype=float)
    tail = np.where(np.arange(paths.grid.n_slots) >= t_index, u, 0.0)
    residual = split_product_residual(u, t_index, paths)
    mean_rep = mean_exponential(tail, paths)
    return ConditionalReport(paths.n_paths, residual, mean_rep)
