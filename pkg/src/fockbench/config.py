"""Run configuration for the batch front-end.

One JSON file drives everything: space sizes, grid, tolerances, the root
seed, the x grid for characteristic functions, and the numeric scenario
blocks (paths and strength data as inline arrays, complex entries as
[re, im] pairs).  All randomness flows from the root seed through
`derive_seed(root, label)` so reruns are bit-reproducible.
"""

import copy
import json
from dataclasses import dataclass, field

import numpy as np

from . import serialize
from .serialize import derive_seed
from .numerics import Tolerances

__all__ = ["RunConfig", "load_config", "default_config_dict", "derive_seed"]


DEFAULT_CONFIG = {
    "d": 1,
    "fock_cutoff": 16,
    "slot_cutoff": 3,
    "grid": {"T": 1.0, "n_slots": 6},
    "tolerances": {"algebraic": 1e-10, "exponential": 1e-9},
    "seed": 20260809,
    "x_grid": {"min": -3.0, "max": 3.0, "points": 25},
    "out_dir": "out",
    "dim_limit": 20000,
    "scenarios": {
        "gauss": {"u": [[0.6, 0.0], [0.3, 0.1]]},
        "poissonfield": {
            "u": [[0.4, 0.0], [0.3, 0.0]],
            "H": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-2.0, 0.0]]],
            "t": 1.0,
        },
        "type1": {
            "psi": [[0.6, 0.0], [0.3, 0.0]],
            "H": [[[1.0, 0.0], [0.5, 0.0]], [[0.5, 0.0], [-1.0, 0.0]]],
        },
        "type2": {
            "psi": [[0.5, 0.0], [0.2, 0.0]],
            "H": [[[1.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [1.0, 0.0]]],
        },
        "combine": {"drift": 0.25},
        "weyl": {
            "phi": [[0.4, 0.1]],
            "theta": 0.7,
            "f": [[0.3, 0.0]],
            "g": [[0.2, 0.1]],
        },
        "fundamental": {
            "f": [[0.2, 0.0]],
            "g": [[0.15, 0.05]],
            "N1": {
                "alpha": [0.3, 0.0],
                "bra": [[0.4, 0.0]],
                "ket": [[0.5, 0.0]],
                "op": [[[0.6, 0.0]]],
            },
            "N2": {
                "alpha": [0.1, 0.2],
                "bra": [[0.2, 0.1]],
                "ket": [[0.3, 0.0]],
                "op": [[[0.4, 0.2]]],
            },
        },
        "wiener": {"u": [0.5, -0.3, 0.8, 0.2, -0.6, 0.4], "v": [0.2, 0.4, -0.1, 0.3, 0.5, -0.2]},
    },
}


@dataclass
class RunConfig:
    d: int
    fock_cutoff: int
    slot_cutoff: int
    horizon: float
    n_slots: int
    tolerances: Tolerances
    seed: int
    x_min: float
    x_max: float
    x_points: int
    out_dir: str
    dim_limit: int
    scenarios: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    @property
    def config_hash(self) -> str:
        # out_dir only says where reports land, not what they contain
        doc = {k: v for k, v in self.raw.items() if k != "out_dir"}
        return serialize.config_hash(doc)

    def x_grid(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.x_points)

    def scenario(self, name: str) -> dict:
        if name not in self.scenarios:
            raise KeyError(f"scenario {name!r} missing from the configuration")
        return self.scenarios[name]


def default_config_dict() -> dict:
    return copy.deepcopy(DEFAULT_CONFIG)


def _from_dict(doc: dict) -> RunConfig:
    merged = default_config_dict()
    _deep_update(merged, doc)
    tol = merged.get("tolerances", {})
    seed = int(merged["seed"])
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    n_slots = int(merged["grid"]["n_slots"])
    slot_dim = _slot_dim(int(merged["d"]), int(merged["slot_cutoff"]))
    if slot_dim ** n_slots > int(merged["dim_limit"]):
        raise ValueError(
            f"dense slot space of dimension {slot_dim ** n_slots} exceeds "
            f"dim_limit {merged['dim_limit']}"
        )
    return RunConfig(
        d=int(merged["d"]),
        fock_cutoff=int(merged["fock_cutoff"]),
        slot_cutoff=int(merged["slot_cutoff"]),
        horizon=float(merged["grid"]["T"]),
        n_slots=n_slots,
        tolerances=Tolerances(
            algebraic=float(tol.get("algebraic", 1e-10)),
            exponential=float(tol.get("exponential", 1e-9)),
        ),
        seed=seed,
        x_min=float(merged["x_grid"]["min"]),
        x_max=float(merged["x_grid"]["max"]),
        x_points=int(merged["x_grid"]["points"]),
        out_dir=str(merged["out_dir"]),
        dim_limit=int(merged["dim_limit"]),
        scenarios=merged.get("scenarios", {}),
        raw=merged,
    )


def _slot_dim(modes: int, cutoff: int) -> int:
    import math

    return sum(math.comb(modes + k - 1, k) for k in range(cutoff + 1))


def _deep_update(base: dict, extra: dict):
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _deep_update(base[key], value)
        else:
            base[key] = value


def load_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    doc = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    if overrides:
        _deep_update(doc, overrides)
    return _from_dict(doc)


def parse_cvector(doc) -> np.ndarray:
    return serialize.pairs_to_complex(doc)


def parse_cmatrix(doc) -> np.ndarray:
    return serialize.pairs_to_complex(doc)
