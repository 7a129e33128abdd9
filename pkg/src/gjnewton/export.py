"""Artifact writers: diagram SVG, reflector surface mesh, residual CSV, run report."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Optional

import numpy as np

from .diagram import LaguerreDiagram
from .genfun import Domain, GeneratingFunctionSpec, square_domain

_PALETTE = ("#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd")


def _f(x: float) -> str:
    s = f"{x:.9g}"
    return "0" if s == "-0" else s


def _loop_path(loop) -> str:
    parts = [f"M{_f(loop[0].p0[0])},{_f(loop[0].p0[1])}"]
    for e in loop:
        if e.is_arc:
            r = _f(e.radius)
            sweep = 1 if e.span > 0 else 0
            pieces = [e]
            if abs(e.span) > math.pi:
                # full circles cannot be a single arc command; split any big arc in two
                mid = e.point_at(0.5)
                pieces = [e.sub(0.0, 0.5, e.p0, mid), e.sub(0.5, 1.0, mid, e.p1)]
            for p in pieces:
                large = 1 if abs(p.span) > math.pi else 0
                parts.append(f"A{r},{r} 0 {large} {sweep} {_f(p.p1[0])},{_f(p.p1[1])}")
        else:
            parts.append(f"L{_f(e.p1[0])},{_f(e.p1[1])}")
    parts.append("Z")
    return " ".join(parts)


def svg_string(diagram: LaguerreDiagram, domain: Optional[Domain] = None, size: int = 800) -> str:
    """SVG 1.1 document with one closed path per non-empty cell and a dot per site."""
    if domain is None:
        boxes = [c.bbox() for c in diagram.cells if not c.is_empty]
        x0, x1 = min(b[0] for b in boxes), max(b[1] for b in boxes)
        y0, y1 = min(b[2] for b in boxes), max(b[3] for b in boxes)
    else:
        x0, x1, y0, y1 = domain.xmin, domain.xmax, domain.ymin, domain.ymax
    w, h = x1 - x0, y1 - y0
    scale = size / max(w, h)
    stroke = _f(0.75 / scale)
    dot = _f(2.0 / scale)
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(w * scale)}" height="{_f(h * scale)}" '
        f'viewBox="0 0 {_f(w * scale)} {_f(h * scale)}">',
        # flip y so that the diagram keeps its mathematical orientation
        f'<g transform="matrix({_f(scale)},0,0,{_f(-scale)},{_f(-x0 * scale)},{_f(y1 * scale)})">',
    ]
    for i, cell in enumerate(diagram.cells):
        if cell.is_empty:
            continue
        d = " ".join(_loop_path(loop) for loop in cell.loops)
        lines.append(
            f'<path id="cell{i}" d="{d}" fill="{_PALETTE[i % len(_PALETTE)]}" fill-rule="evenodd" '
            f'stroke="#333333" stroke-width="{stroke}"/>'
        )
    for i, (x, y) in enumerate(np.asarray(diagram.sites, dtype=float)):
        lines.append(f'<circle id="site{i}" cx="{_f(x)}" cy="{_f(y)}" r="{dot}" fill="#000000"/>')
    lines += ["</g>", "</svg>", ""]
    return "\n".join(lines)


def render_svg(diagram: LaguerreDiagram, path, domain: Optional[Domain] = None) -> Path:
    path = Path(path)
    try:
        path.write_text(svg_string(diagram, domain), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write SVG to {path}: {exc.strerror}") from exc
    return path


def surface_heights(spec: GeneratingFunctionSpec, domain: Domain, sites, psi_raw, resolution: int):
    """Grid coordinates and ``u(x) = max_j G(x, y_j, psi_j)`` on a regular grid."""
    xs = np.linspace(domain.xmin, domain.xmax, resolution)
    ys = np.linspace(domain.ymin, domain.ymax, resolution)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    pts = np.stack([X, Y], axis=-1).reshape(-1, 2)
    sites = np.asarray(sites, dtype=float)
    psi_raw = np.asarray(psi_raw, dtype=float)
    U = np.empty(len(pts))
    for s in range(0, len(pts), 4096):
        chunk = pts[s : s + 4096]
        U[s : s + 4096] = spec.G(chunk[:, None, :], sites[None], psi_raw[None]).max(axis=1)
    return pts, U


def surface_obj(spec, sites, psi_raw, resolution: int, domain: Optional[Domain] = None) -> str:
    if resolution < 2:
        raise ValueError("mesh resolution must be >= 2")
    domain = domain or square_domain()
    pts, U = surface_heights(spec, domain, sites, psi_raw, resolution)
    out = [f"v {_f(x)} {_f(y)} {_f(z)}" for (x, y), z in zip(pts, U)]
    r = resolution
    for j in range(r - 1):
        for i in range(r - 1):
            a = j * r + i + 1
            b, c, d = a + 1, a + r + 1, a + r
            out.append(f"f {a} {b} {c}")
            out.append(f"f {a} {c} {d}")
    return "\n".join(out) + "\n"


def export_surface(spec, sites, psi_raw, resolution: int, path, domain: Optional[Domain] = None) -> Path:
    """Write the surface ``u`` as a Wavefront-style triangle mesh."""
    path = Path(path)
    try:
        path.write_text(surface_obj(spec, sites, psi_raw, resolution, domain), encoding="ascii")
    except OSError as exc:
        raise OSError(f"cannot write mesh to {path}: {exc.strerror}") from exc
    return path


def residual_csv(report) -> str:
    rows = ["iter,res_l2,res_l1,tau"]
    taus = report.tau_history
    for k, (l2, l1) in enumerate(zip(report.residual_history, report.residual_l1_history)):
        tau = repr(taus[k]) if k < len(taus) else ""
        rows.append(f"{k},{l2!r},{l1!r},{tau}")
    return "\n".join(rows) + "\n"


def report_dict(report, spec: GeneratingFunctionSpec) -> dict:
    psi_raw = spec.to_raw(report.psi_final)
    return {
        "status": report.status.value,
        "iterations": report.iterations,
        "res_l2": report.residual_history[-1],
        "res_l1": report.residual_l1_history[-1],
        "wall_ms": round(report.wall_ms, 3),
        "tau_history": list(report.tau_history),
        "res_l2_history": list(report.residual_history),
        "res_l1_history": list(report.residual_l1_history),
        "delta": report.delta,
        "family": spec.family.value,
        "gamma": spec.gamma,
        "psi": [float(v) for v in psi_raw],
        "psi_solver": [float(v) for v in report.psi_final],
        "masses": [float(v) for v in report.H_final],
    }


def write_json(data: dict, path) -> Path:
    path = Path(path)
    try:
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror}") from exc
    return path


def load_psi(path) -> np.ndarray:
    """Raw potentials from a run report (its ``psi`` key) or a whitespace-separated text file."""
    path = Path(path)
    if path.suffix == ".json":
        with open(path, encoding="utf-8") as fh:
            return np.asarray(json.load(fh)["psi"], dtype=float)
    return np.atleast_1d(np.loadtxt(path, dtype=float))
