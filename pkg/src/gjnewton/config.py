"""Run configuration files.

A run is described by one TOML file::

    family = "reflector"          # or "quadratic_ot"
    gamma = "auto"                # or a number (reflector only)

    [domain]
    preset = "square"             # [-1, 1]^2 with density 1/4; or give the box:
    # xmin = 0.0
    # xmax = 1.0
    # ymin = 0.0
    # ymax = 1.0

    [sites]
    count = 100                   # generated uniformly in `box` from `seed`
    seed = 42
    box = [0.0, 1.0, 0.0, 1.0]    # xmin, xmax, ymin, ymax
    # points = [[0.25, 0.5], [0.75, 0.5]]   # explicit sites instead

    [target]
    weights = "uniform"           # or a list, normalized to sum 1

    [solver]
    epsilon = 1e-10
    max_iterations = 100
    delta = "auto"
    alpha = 0.0

    [outputs]
    report = "report.json"
    svg = "diagram.svg"
    csv = "residuals.csv"
    mesh = "surface.obj"
    mesh_resolution = 64

Relative output paths are resolved against the directory of the config file.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .genfun import Domain, Family, GeneratingFunctionSpec, quadratic_ot, reflector, square_domain, twist_gamma_bound
from .newton import Problem, SolverConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Outputs:
    report: Optional[Path] = None
    svg: Optional[Path] = None
    csv: Optional[Path] = None
    mesh: Optional[Path] = None
    mesh_resolution: int = 64


@dataclass
class RunConfig:
    family: Family
    gamma: Union[str, float]
    domain: Domain
    sites: np.ndarray
    nu: np.ndarray
    solver: SolverConfig
    outputs: Outputs = field(default_factory=Outputs)

    def spec(self) -> GeneratingFunctionSpec:
        if self.family is Family.QUADRATIC_OT:
            return quadratic_ot()
        g = twist_gamma_bound(self.domain, self.sites) if self.gamma == "auto" else float(self.gamma)
        return reflector(g)

    def problem(self) -> Problem:
        return Problem(self.spec(), self.domain, self.sites, self.nu)


def _num(table, key, default, kind=float):
    val = table.get(key, default)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{key} must be a number, got {val!r}")
    if kind is int and val != int(val):
        raise ConfigError(f"{key} must be an integer, got {val!r}")
    return kind(val)


def _domain(tab) -> Domain:
    preset = tab.get("preset")
    if preset is not None:
        if preset != "square":
            raise ConfigError(f"unknown domain preset {preset!r}")
        return square_domain()
    if tab.get("density", "uniform") != "uniform":
        raise ConfigError("only the uniform density can be set from a config file")
    try:
        return Domain.uniform(*(_num(tab, k, None) for k in ("xmin", "xmax", "ymin", "ymax")))
    except ValueError as exc:
        raise ConfigError(f"domain: {exc}") from exc


def _sites(tab) -> np.ndarray:
    if "points" in tab:
        pts = np.asarray(tab["points"], dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
            raise ConfigError("sites.points must be a non-empty list of [x, y] pairs")
        return pts
    n = _num(tab, "count", None, int)
    if n < 1:
        raise ConfigError("sites.count must be >= 1")
    seed = _num(tab, "seed", 0, int)
    box = tab.get("box", [0.0, 1.0, 0.0, 1.0])
    if len(box) != 4 or not (box[1] > box[0] and box[3] > box[2]):
        raise ConfigError("sites.box must be [xmin, xmax, ymin, ymax] with positive extent")
    u = np.random.default_rng(seed).random((n, 2))
    return np.column_stack([box[0] + u[:, 0] * (box[1] - box[0]), box[2] + u[:, 1] * (box[3] - box[2])])


def _target(tab, n) -> np.ndarray:
    w = tab.get("weights", "uniform")
    if w == "uniform":
        return np.full(n, 1.0 / n)
    w = np.asarray(w, dtype=float)
    if w.shape != (n,):
        raise ConfigError(f"target.weights has {w.size} entries for {n} sites")
    if np.any(w <= 0):
        raise ConfigError("target weights must be positive")
    return w / w.sum()


def _solver(tab) -> SolverConfig:
    delta = tab.get("delta", "auto")
    if delta != "auto":
        delta = _num(tab, "delta", None)
    try:
        return SolverConfig(
            epsilon=_num(tab, "epsilon", 1e-10),
            max_iterations=_num(tab, "max_iterations", 100, int),
            tau_min=_num(tab, "tau_min", 2.0**-30),
            delta=None if delta == "auto" else delta,
            alpha=_num(tab, "alpha", 0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from exc


def parse_config(data: dict, base_dir: Union[str, Path] = ".") -> RunConfig:
    base = Path(base_dir)
    try:
        family = Family(data.get("family", "reflector"))
    except ValueError:
        raise ConfigError(f"unknown family {data.get('family')!r}") from None
    gamma = data.get("gamma", "auto")
    if gamma != "auto":
        gamma = _num(data, "gamma", None)
        if gamma <= 0:
            raise ConfigError("gamma must be positive")
    domain = _domain(data.get("domain", {"preset": "square"}))
    if "sites" not in data:
        raise ConfigError("missing [sites] section")
    sites = _sites(data["sites"])
    nu = _target(data.get("target", {}), len(sites))
    solver = _solver(data.get("solver", {}))
    out = data.get("outputs", {})
    paths = {}
    for key in ("report", "svg", "csv", "mesh"):
        if key in out:
            p = Path(out[key])
            paths[key] = p if p.is_absolute() else base / p
    outputs = Outputs(mesh_resolution=_num(out, "mesh_resolution", 64, int), **paths)
    if outputs.mesh_resolution < 2:
        raise ConfigError("outputs.mesh_resolution must be >= 2")
    return RunConfig(family, gamma, domain, sites, nu, solver, outputs)


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return parse_config(data, path.parent)
