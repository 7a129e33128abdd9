"""Command-line entry point.

Verbs::

    gjnewton solve <config>
    gjnewton validate <config>
    gjnewton diagram <config> --psi <file> [--out diagram.svg]
    gjnewton oracle <config> --psi <file> [--mc n --seed s | --grid r]

Exit codes: 0 success, 2 not converged, 3 invalid config, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import export, oracle
from .config import ConfigError, RunConfig, load_config
from .diagram import build_diagram
from .genfun import DomainError, Family
from .massmap import InitializationError, masses_of
from .newton import Status, solve

EXIT_OK = 0
EXIT_NOT_CONVERGED = 2
EXIT_INVALID = 3
EXIT_NUMERICAL = 4

GEOM_TOL = 1e-9

log = logging.getLogger(__name__)


@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _duplicates(P) -> List[str]:
    order = np.lexsort((P[:, 1], P[:, 0]))
    Q = P[order]
    same = np.all(np.abs(np.diff(Q, axis=0)) <= 1e-12, axis=1)
    return [f"sites {order[k]} and {order[k + 1]} coincide" for k in np.flatnonzero(same)]


def _collinear(P, tol: float) -> List[str]:
    """Triples whose directions seen from one of them differ by at most ``tol`` radians mod pi."""
    out = []
    n = len(P)
    if n < 3:
        return out
    for i in range(n):
        d = np.delete(P, i, axis=0) - P[i]
        idx = np.delete(np.arange(n), i)
        ang = np.mod(np.arctan2(d[:, 1], d[:, 0]), np.pi)
        order = np.argsort(ang, kind="stable")
        a = ang[order]
        gaps = np.append(np.diff(a), a[0] + np.pi - a[-1])
        for k in np.flatnonzero(gaps <= tol):
            j, m = idx[order[k]], idx[order[(k + 1) % len(a)]]
            tri = tuple(sorted((i, int(j), int(m))))
            msg = f"sites {tri[0]}, {tri[1]}, {tri[2]} are collinear"
            if msg not in out:
                out.append(msg)
    return out


def _wall_bisectors(P, domain, tol: float) -> List[str]:
    """Pairs whose perpendicular bisector is the supporting line of a wall."""
    out = []
    walls = ((0, domain.xmin), (0, domain.xmax), (1, domain.ymin), (1, domain.ymax))
    for i in range(len(P) - 1):
        q = P[i + 1 :]
        mid = 0.5 * (P[i] + q)
        for axis, c in walls:
            # a bisector x = c needs equal y and midpoint on the wall (and vice versa)
            hit = (np.abs(q[:, 1 - axis] - P[i, 1 - axis]) <= tol) & (np.abs(mid[:, axis] - c) <= tol)
            for k in np.flatnonzero(hit):
                out.append(f"bisector of sites {i} and {i + 1 + k} lies on the wall {'xy'[axis]} = {c:g}")
    return out


def validate(cfg: RunConfig) -> ValidationReport:
    rep = ValidationReport()
    P = cfg.sites
    rep.violations += _duplicates(P)
    if cfg.family is Family.NEAR_FIELD_REFLECTOR:
        rep.violations += _collinear(P, GEOM_TOL)
    rep.violations += _wall_bisectors(P, cfg.domain, GEOM_TOL)
    if cfg.solver.delta is not None and cfg.solver.delta > cfg.nu.min() / 2:
        rep.violations.append(f"delta {cfg.solver.delta:g} exceeds min(nu)/2 = {cfg.nu.min() / 2:g}")
    if cfg.family is Family.NEAR_FIELD_REFLECTOR and cfg.gamma != "auto":
        d = np.sqrt(((P[:, None, :] - cfg.domain.corners[None]) ** 2).sum(-1)).max()
        if cfg.gamma * d >= 1.0:
            rep.violations.append(f"gamma {cfg.gamma:g} breaks the twist bound 1/{d:.6g}")
    return rep


def run(cfg: RunConfig) -> int:
    """Solve the configured problem and write every requested artifact."""
    rep = validate(cfg)
    if not rep.ok:
        for v in rep.violations:
            log.error("%s", v)
        return EXIT_INVALID
    problem = cfg.problem()
    try:
        report = solve(problem, cfg.solver)
    except (InitializationError, DomainError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except ValueError as exc:
        log.error("invalid problem: %s", exc)
        return EXIT_INVALID
    spec = problem.spec
    out = cfg.outputs
    if out.report is not None:
        export.write_json(export.report_dict(report, spec), out.report)
    if out.csv is not None:
        out.csv.write_text(export.residual_csv(report), encoding="ascii")
    if out.svg is not None:
        diagram = build_diagram(spec, problem.domain, problem.sites, spec.to_raw(report.psi_final))
        export.render_svg(diagram, out.svg, problem.domain)
    if out.mesh is not None:
        if spec.is_reflector:
            export.export_surface(spec, problem.sites, spec.to_raw(report.psi_final), out.mesh_resolution, out.mesh, problem.domain)
        else:
            log.warning("mesh output is only defined for the reflector family; skipped")
    log.info("%s after %d iterations, res_l2 %.3e", report.status.value, report.iterations, report.residual_history[-1])
    if report.status is Status.CONVERGED:
        return EXIT_OK
    if report.status is Status.MAX_ITERATIONS:
        return EXIT_NOT_CONVERGED
    return EXIT_NUMERICAL


def _psi_for(cfg: RunConfig, path) -> np.ndarray:
    psi = export.load_psi(path)
    if psi.shape != (len(cfg.sites),):
        raise ConfigError(f"{path}: {psi.size} potentials for {len(cfg.sites)} sites")
    return psi


def _cmd_solve(args) -> int:
    return run(load_config(args.config))


def _cmd_validate(args) -> int:
    rep = validate(load_config(args.config))
    for v in rep.violations:
        print(v)
    if rep.ok:
        print("ok")
        return EXIT_OK
    return EXIT_INVALID


def _cmd_diagram(args) -> int:
    cfg = load_config(args.config)
    spec = cfg.spec()
    psi = _psi_for(cfg, args.psi)
    diagram = build_diagram(spec, cfg.domain, cfg.sites, psi)
    out = args.out or cfg.outputs.svg or "diagram.svg"
    export.render_svg(diagram, out, cfg.domain)
    H = masses_of(diagram, cfg.domain)
    print("site,mass")
    for i, h in enumerate(H):
        print(f"{i},{float(h)!r}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    cfg = load_config(args.config)
    spec = cfg.spec()
    psi = _psi_for(cfg, args.psi)
    exact = masses_of(build_diagram(spec, cfg.domain, cfg.sites, psi), cfg.domain)
    result = {"exact": exact.tolist()}
    if args.grid is not None:
        est = oracle.grid_mass(spec, cfg.domain, cfg.sites, psi, oracle.SampleConfig(grid_resolution=args.grid), raw=True)
        result.update(method="grid", resolution=args.grid, estimate=est.tolist(), max_abs_dev=float(np.abs(est - exact).max()))
    else:
        sc = oracle.SampleConfig(n_samples=args.mc, seed=args.seed)
        est, se = oracle.mc_mass(spec, cfg.domain, cfg.sites, psi, sc, raw=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(se > 0, np.abs(est - exact) / se, np.where(est == exact, 0.0, np.inf))
        result.update(method="mc", n_samples=args.mc, seed=args.seed, estimate=est.tolist(), stderr=se.tolist(), max_z=float(z.max()))
    print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gjnewton", description="Damped Newton solver for semi-discrete generated Jacobian equations.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log every iteration")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("solve", help="solve and write the configured outputs")
    p.add_argument("config")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("validate", help="check the genericity conditions of a config")
    p.add_argument("config")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("diagram", help="render the diagram of given raw potentials")
    p.add_argument("config")
    p.add_argument("--psi", required=True, help="report JSON or text file of raw potentials")
    p.add_argument("--out", help="SVG path (default: outputs.svg or diagram.svg)")
    p.set_defaults(func=_cmd_diagram)

    p = sub.add_parser("oracle", help="compare exact masses against a brute-force estimate")
    p.add_argument("config")
    p.add_argument("--psi", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--mc", type=int, default=10**5, metavar="N", help="Monte-Carlo sample count")
    g.add_argument("--grid", type=int, metavar="R", help="midpoint grid resolution instead of sampling")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_oracle)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (DomainError, InitializationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
