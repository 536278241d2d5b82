"""Experiment configuration: JSON files merged over per-experiment defaults."""
from __future__ import annotations

import copy
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DomainError
from ..lattice_field import Lattice, LinkExponentField, SiteId, ThetaField, field_from_spec
from ..quantum_scaling import Observable, WavePacket

EXPERIMENTS = (
    "axioms",
    "transport",
    "path_independence",
    "packet_scaling",
    "momentum_gauge",
    "energy_equation",
    "region_L",
    "protocol",
)

SEED_ENV = "SCALEGAUGE_SEED"

_BASE = {
    "seed": 0,
    "lattice": {"extent": [256], "spacing": 0.1, "boundary": "open", "origin": 0.0},
    "theta": {"kind": "linear", "slope": [0.05]},
    "packet": {"kind": "gaussian", "center": [3.2], "sigma": 0.5},
    "observables": [{"kind": "position"}, {"kind": "momentum"}],
    "sites": {"x": [0], "y": [32], "z": [200]},
    "tolerances": {},
    "params": {},
}

DEFAULTS = {
    "axioms": {
        "tolerances": {"axiom": 1e-9, "broken_fail_fraction": 0.99, "lift": 1e-9, "term": 1e-12},
        "params": {"count": 10000, "n_r": 20, "r_min": 1e-6, "r_max": 1e6,
                   "n_polynomials": 1000, "max_degree": 8},
    },
    "transport": {
        "theta": {"kind": "gaussian_bump", "center": [12.8], "width": 3.0, "height": 0.8},
        "tolerances": {"factorization": 1e-14},
        "params": {"count": 200},
    },
    "path_independence": {
        "lattice": {"extent": [16, 16], "spacing": 1.0, "boundary": "open", "origin": 0.0},
        "theta": {"kind": "gaussian_bump", "center": [7.5, 7.5], "width": 4.0, "height": 2.0},
        "packet": None,
        "observables": [],
        "sites": {"x": [0, 0], "y": [15, 15], "z": [8, 3]},
        "tolerances": {"path": 1e-10, "loop": 1e-10},
        "params": {"random_fields": 20, "theta_scale": 2.0, "path_pairs": 100, "loops": 100,
                   "loop_steps": 12, "circulation": 0.3},
    },
    "packet_scaling": {
        "tolerances": {"coincidence": 1e-12, "transfer": 1e-12, "oracle": 1e-10},
        "params": {"ordering_packets": 6},
    },
    "momentum_gauge": {
        "theta": {"kind": "gaussian_bump", "center": [12.8], "width": 2.0, "height": 1.0},
        "packet": {"kind": "gaussian", "center": [12.8], "sigma": 1.0, "k0": [2.0]},
        "tolerances": {"order_ratio": 2.0, "order_band": 0.25, "gauge_term": 1e-12},
        "params": {"halvings": 2, "hbar": 1.0, "axis": 0, "gauge_slope": 0.05},
    },
    "energy_equation": {
        "lattice": {"extent": [64], "spacing": 0.1, "boundary": "open", "origin": 0.0},
        "theta": {"kind": "gaussian_bump", "center": [3.2], "width": 1.0, "height": 0.4},
        "packet": None,
        "observables": [{"kind": "hamiltonian", "potential": {"random": 5.0}, "mass": 1.0}],
        "sites": {"x": [0], "y": [40], "z": [20]},
        "tolerances": {"residual": 1e-10},
        "params": {},
    },
    "region_L": {
        "theta": {"kind": "linear", "slope": [0.01]},
        "packet": {"kind": "gaussian", "center": [15.0], "sigma": 0.5},
        "sites": {"x": [0], "y": [150], "z": None},
        "tolerances": {"factor": 1e-12},
        "params": {"tol_r": [1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.5]},
    },
    "protocol": {
        "params": {"extra_sites": [[64], [128]]},
    },
}

_MERGED_KEYS = ("sites", "tolerances", "params")


def default_config(experiment: str) -> dict:
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    cfg = copy.deepcopy(_BASE)
    for key, val in DEFAULTS[experiment].items():
        if key in _MERGED_KEYS:
            cfg[key].update(copy.deepcopy(val))
        else:
            cfg[key] = copy.deepcopy(val)
    return cfg


def merge_config(experiment: str, user: dict | None) -> dict:
    """Defaults for ``experiment`` overlaid with ``user``.

    Sections ``sites``, ``tolerances`` and ``params`` are merged key by key;
    every other section is replaced whole.
    """
    cfg = default_config(experiment)
    for key, val in (user or {}).items():
        if key == "experiment":
            if val != experiment:
                raise ConfigError(f"config is for experiment {val!r}, not {experiment!r}")
            continue
        if key in _MERGED_KEYS and isinstance(val, dict):
            cfg[key].update(val)
        elif key in cfg:
            cfg[key] = val
        else:
            raise ConfigError(f"unknown config section {key!r}")
    return cfg


@dataclass
class ExperimentConfig:
    experiment: str
    raw: dict
    lattice: Lattice
    seed: int

    @classmethod
    def from_dict(cls, experiment: str, user: dict | None = None, env=None) -> ExperimentConfig:
        raw = merge_config(experiment, user)
        env = os.environ if env is None else env
        if env.get(SEED_ENV):
            try:
                raw["seed"] = int(env[SEED_ENV])
            except ValueError:
                raise ConfigError(f"{SEED_ENV} must be an integer") from None
        try:
            seed = int(raw["seed"])
            lat = raw["lattice"]
            lattice = Lattice(tuple(lat["extent"]), float(lat.get("spacing", 0.1)),
                              lat.get("boundary", "open"), float(lat.get("origin", 0.0)))
        except (KeyError, TypeError, ValueError, DomainError) as e:
            raise ConfigError(f"invalid lattice or seed: {e}") from None
        cfg = cls(experiment, raw, lattice, seed)
        cfg._validate()
        return cfg

    def _validate(self):
        # resolve every cross-reference up front so failures surface as config errors
        try:
            self.field()
            self.packet()
            self.observables()
            for name in self.raw["sites"]:
                self.site(name)
        except ConfigError:
            raise
        except (DomainError, KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"invalid config: {e}") from None

    def field(self) -> ThetaField | LinkExponentField:
        return field_from_spec(self.lattice, self.raw["theta"])

    def theta(self) -> ThetaField:
        f = self.field()
        if not isinstance(f, ThetaField):
            raise ConfigError(f"experiment {self.experiment!r} needs a scalar theta field")
        return f

    def site(self, name: str) -> SiteId | None:
        coords = self.raw["sites"].get(name)
        if coords is None:
            return None
        try:
            return self.lattice.site(tuple(coords))
        except DomainError as e:
            raise ConfigError(f"site {name!r}: {e}") from None

    def packet(self) -> WavePacket | None:
        return packet_from_spec(self.lattice, self.raw.get("packet"))

    def observables(self) -> list[Observable]:
        rng = np.random.default_rng(self.seed)
        return [observable_from_spec(self.lattice, spec, rng) for spec in self.raw.get("observables") or []]

    @property
    def tolerances(self) -> dict:
        return self.raw["tolerances"]

    @property
    def params(self) -> dict:
        return self.raw["params"]


def packet_from_spec(lattice: Lattice, spec: dict | None) -> WavePacket | None:
    if spec is None:
        return None
    kind = spec.get("kind")
    if kind == "gaussian":
        return WavePacket.gaussian(lattice, spec["center"], float(spec["sigma"]), spec.get("k0", 0.0))
    if kind == "delta":
        return WavePacket.delta(lattice.site(tuple(spec["site"])))
    if kind == "explicit":
        re_part = np.asarray(spec["re"], dtype=float)
        im_part = np.asarray(spec.get("im", np.zeros_like(re_part)), dtype=float)
        return WavePacket.from_array(lattice, re_part + 1j * im_part)
    raise ConfigError(f"unknown packet kind {kind!r}")


def observable_from_spec(lattice: Lattice, spec: dict, rng: np.random.Generator) -> Observable:
    kind = spec.get("kind")
    axis = int(spec.get("axis", 0))
    hbar = float(spec.get("hbar", 1.0))
    if kind == "position":
        return Observable.position(lattice, axis)
    if kind == "momentum":
        return Observable.momentum(lattice, axis, hbar, spec.get("scheme", "forward"))
    if kind == "hamiltonian":
        pot = spec.get("potential")
        if isinstance(pot, dict) and "random" in pot:
            pot = float(pot["random"]) * rng.uniform(-1.0, 1.0, lattice.n_sites)
        return Observable.hamiltonian(lattice, pot, float(spec.get("mass", 1.0)), hbar)
    raise ConfigError(f"unknown observable kind {kind!r}")


def load_config(path: str | Path, experiment: str) -> ExperimentConfig:
    try:
        user = json.loads(Path(path).read_text())
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from None
    if not isinstance(user, dict):
        raise ConfigError("config file must hold a JSON object")
    return ExperimentConfig.from_dict(experiment, user)
