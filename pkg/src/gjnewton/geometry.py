"""Cells bounded by line segments and circular arcs.

A cell is an :class:`ArcPolygon`: a list of closed loops, each a cyclic list
of :class:`Segment` / :class:`Arc` edges chained head to tail.  Outer loops run
counter-clockwise and holes clockwise, so signed areas simply add up.

Constraints are kept in implicit form ``f(x) = a|x|^2 - 2 b.x + k <= 0``,
scaled so that ``|grad f| = 1`` on the curve ``f = 0``.  This covers disks
(``a > 0``), disk complements (``a < 0``) and half-planes (``a = 0``) with one
set of formulas that stays well conditioned when ``a`` is small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

TWO_PI = 2.0 * math.pi

# relative parameter tolerance for intersections near edge endpoints
T_EPS = 1e-12
# |f| below this (unit-gradient scaling) means "lies on the constraint curve"
ON_CURVE_TOL = 1e-11
# tangency: the two roots closer than this (in edge parameter) are dropped
TANGENT_TOL = 1e-12

GL_ORDER = 16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
_GL_X01 = 0.5 * (_GL_X + 1.0)
_GL_W01 = 0.5 * _GL_W

# owner tags of the rectangle walls
WALL_BOTTOM, WALL_RIGHT, WALL_TOP, WALL_LEFT = -1, -2, -3, -4

Point = Tuple[float, float]


class Segment:
    __slots__ = ("p0", "p1", "owner")

    def __init__(self, p0: Point, p1: Point, owner: int):
        self.p0 = p0
        self.p1 = p1
        self.owner = owner

    is_arc = False

    def point_at(self, s: float) -> Point:
        (x0, y0), (x1, y1) = self.p0, self.p1
        return (x0 + s * (x1 - x0), y0 + s * (y1 - y0))

    def length(self) -> float:
        return math.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])

    def sub(self, s0: float, s1: float, q0: Point, q1: Point) -> "Segment":
        return Segment(q0, q1, self.owner)

    def reversed(self) -> "Segment":
        return Segment(self.p1, self.p0, self.owner)

    def __repr__(self):
        return f"Segment({self.p0}, {self.p1}, owner={self.owner})"


class Arc:
    """Circular arc from angle ``theta0`` sweeping the signed ``span`` (ccw > 0)."""

    __slots__ = ("p0", "p1", "center", "radius", "theta0", "span", "owner")

    def __init__(self, p0, p1, center, radius, theta0, span, owner):
        self.p0 = p0
        self.p1 = p1
        self.center = center
        self.radius = radius
        self.theta0 = theta0
        self.span = span
        self.owner = owner

    is_arc = True

    def point_at(self, s: float) -> Point:
        # offset from p0 along the chord direction; exact for huge radii
        half = 0.5 * s * self.span
        chord = 2.0 * self.radius * math.sin(half)
        th = self.theta0 + half
        return (self.p0[0] - chord * math.sin(th), self.p0[1] + chord * math.cos(th))

    def length(self) -> float:
        return self.radius * abs(self.span)

    def sub(self, s0: float, s1: float, q0: Point, q1: Point) -> "Arc":
        return Arc(
            q0,
            q1,
            self.center,
            self.radius,
            self.theta0 + s0 * self.span,
            (s1 - s0) * self.span,
            self.owner,
        )

    def reversed(self) -> "Arc":
        return Arc(
            self.p1,
            self.p0,
            self.center,
            self.radius,
            self.theta0 + self.span,
            -self.span,
            self.owner,
        )

    def contains_angle(self, alpha: float) -> bool:
        if self.span >= 0:
            return (alpha - self.theta0) % TWO_PI <= self.span
        return (self.theta0 - alpha) % TWO_PI <= -self.span

    def __repr__(self):
        return (
            f"Arc(center={self.center}, r={self.radius:.6g}, "
            f"theta0={self.theta0:.6g}, span={self.span:.6g}, owner={self.owner})"
        )


ArcEdge = Union[Segment, Arc]


def full_circle(center: Point, radius: float, ccw: bool, owner: int) -> Arc:
    p = (center[0] + radius, center[1])
    return Arc(p, p, center, radius, 0.0, TWO_PI if ccw else -TWO_PI, owner)


class ArcPolygon:
    """A possibly empty union of closed loops of segments and arcs."""

    __slots__ = ("loops", "_bb")

    def __init__(self, loops: Optional[List[List[ArcEdge]]] = None):
        self.loops = [lp for lp in (loops or []) if lp]
        self._bb = None

    @classmethod
    def empty(cls) -> "ArcPolygon":
        return cls([])

    @classmethod
    def rectangle(cls, xmin, xmax, ymin, ymax) -> "ArcPolygon":
        a, b, c, d = (xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)
        return cls(
            [
                [
                    Segment(a, b, WALL_BOTTOM),
                    Segment(b, c, WALL_RIGHT),
                    Segment(c, d, WALL_TOP),
                    Segment(d, a, WALL_LEFT),
                ]
            ]
        )

    @classmethod
    def disk(cls, center, radius, owner: int = 0) -> "ArcPolygon":
        return cls([[full_circle(tuple(map(float, center)), float(radius), True, owner)]])

    @property
    def is_empty(self) -> bool:
        return not self.loops

    @property
    def edges(self) -> List[ArcEdge]:
        return [e for lp in self.loops for e in lp]

    def owners(self) -> set:
        return {e.owner for e in self.edges}

    def signed_area(self) -> float:
        return sum(_loop_area(lp) for lp in self.loops)

    def bbox(self) -> Tuple[float, float, float, float]:
        # loops are never mutated after construction
        if self._bb is None:
            self._bb = _bbox(self.loops)
        return self._bb

    def contains(self, x: Point) -> bool:
        return winding_number(self, x) > 0.5

    def check_invariants(self, tol: float = 1e-9) -> None:
        """Raise ``AssertionError`` when loops do not chain or arcs are inconsistent."""
        for lp in self.loops:
            for e, nxt in zip(lp, lp[1:] + lp[:1]):
                gap = math.hypot(e.p1[0] - nxt.p0[0], e.p1[1] - nxt.p0[1])
                assert gap <= tol, f"loop broken between {e} and {nxt} (gap {gap:.3g})"
                if e.is_arc:
                    assert e.radius > 0
                    assert 0 < abs(e.span) <= TWO_PI + 1e-12
                    for p, s in ((e.p0, 0.0), (e.p1, 1.0)):
                        q = e.point_at(s)
                        err = math.hypot(p[0] - q[0], p[1] - q[1])
                        assert err <= tol * max(1.0, e.radius), f"arc endpoint off by {err:.3g}"

    def __repr__(self):
        return f"ArcPolygon({len(self.loops)} loops, {len(self.edges)} edges)"


# ---------------------------------------------------------------------------
# constraints


ALL, EMPTY, INSIDE, OUTSIDE, HALFPLANE = "all", "empty", "inside_disk", "outside_disk", "half_plane"


@dataclass(frozen=True)
class CircleConstraint:
    """Region ``{x : a|x|^2 - 2 b.x + k <= 0}`` with unit-gradient scaling."""

    kind: str
    a: float = 0.0
    bx: float = 0.0
    by: float = 0.0
    k: float = 0.0
    owner: int = -1

    @classmethod
    def from_quadric(cls, a, bx, by, k, owner: int = -1) -> "CircleConstraint":
        disc = bx * bx + by * by - a * k
        if a == 0.0:
            nb = math.hypot(bx, by)
            if nb == 0.0:
                return cls(ALL if k <= 0 else EMPTY, owner=owner)
            s = 2.0 * nb
            return cls(HALFPLANE, 0.0, bx / s, by / s, k / s, owner)
        if disc <= 0.0:
            return cls(EMPTY if a > 0 else ALL, owner=owner)
        s = 2.0 * math.sqrt(disc)
        return cls(INSIDE if a > 0 else OUTSIDE, a / s, bx / s, by / s, k / s, owner)

    @classmethod
    def inside_disk(cls, center, radius, owner: int = -1):
        cx, cy = center
        return cls.from_quadric(1.0, cx, cy, cx * cx + cy * cy - radius * radius, owner)

    @classmethod
    def outside_disk(cls, center, radius, owner: int = -1):
        cx, cy = center
        return cls.from_quadric(-1.0, -cx, -cy, radius * radius - cx * cx - cy * cy, owner)

    @classmethod
    def half_plane(cls, normal, offset, owner: int = -1):
        """``normal . x <= offset``."""
        nx, ny = normal
        return cls.from_quadric(0.0, -0.5 * nx, -0.5 * ny, -offset, owner)

    @property
    def is_circle(self) -> bool:
        return self.kind in (INSIDE, OUTSIDE)

    @property
    def center(self) -> Point:
        return (self.bx / self.a, self.by / self.a)

    @property
    def radius(self) -> float:
        # unit-gradient scaling gives 2|a|R = 1
        return 0.5 / abs(self.a)

    @property
    def normal(self) -> Point:
        n = math.hypot(self.bx, self.by)
        return (-self.bx / n, -self.by / n)

    @property
    def offset(self) -> float:
        return -self.k

    def __call__(self, x, y):
        return self.a * (x * x + y * y) - 2.0 * (self.bx * x + self.by * y) + self.k

    def contains(self, x: Point) -> bool:
        if self.kind == ALL:
            return True
        if self.kind == EMPTY:
            return False
        return self(x[0], x[1]) <= 0.0


def constraint_from_mobius(lam_i, mu_i, p_i, lam_j, mu_j, p_j, owner: int = -1) -> CircleConstraint:
    """Region where the Mobius power of site i does not exceed that of site j.

    ``{x : lam_i |x - p_i|^2 - mu_i <= lam_j |x - p_j|^2 - mu_j}``
    """
    pix, piy = float(p_i[0]), float(p_i[1])
    pjx, pjy = float(p_j[0]), float(p_j[1])
    a = lam_i - lam_j
    if abs(a) <= 1e-14 * (abs(lam_i) + abs(lam_j)):
        a = 0.0
    bx = lam_i * pix - lam_j * pjx
    by = lam_i * piy - lam_j * pjy
    k = lam_i * (pix * pix + piy * piy) - lam_j * (pjx * pjx + pjy * pjy) - mu_i + mu_j
    return CircleConstraint.from_quadric(a, bx, by, k, owner)


# ---------------------------------------------------------------------------
# clipping


def _roots_segment(e: Segment, c: CircleConstraint) -> List[float]:
    (x0, y0), (x1, y1) = e.p0, e.p1
    dx, dy = x1 - x0, y1 - y0
    a = c.a
    qa = a * (dx * dx + dy * dy)
    qb = 2.0 * (a * (x0 * dx + y0 * dy) - (c.bx * dx + c.by * dy))
    qc = a * (x0 * x0 + y0 * y0) - 2.0 * (c.bx * x0 + c.by * y0) + c.k
    if qa == 0.0:
        if qb == 0.0:
            return []
        roots = [-qc / qb]
    else:
        disc = qb * qb - 4.0 * qa * qc
        if disc <= 0.0:
            return []
        sq = math.sqrt(disc)
        q = -0.5 * (qb + math.copysign(sq, qb))
        r1 = q / qa
        r2 = qc / q if q != 0.0 else r1
        if abs(r1 - r2) <= TANGENT_TOL:
            return []
        roots = [r1, r2] if r1 < r2 else [r2, r1]
    return [t for t in roots if T_EPS < t < 1.0 - T_EPS]


def _roots_arc(e: Arc, c: CircleConstraint) -> List[float]:
    # f along the arc, with sigma the angle swept from p0:
    #   f = f0 + B (cos sigma - 1) + C sin sigma
    # and w = tan(sigma / 2) turns f = 0 into (f0 - 2B) w^2 + 2C w + f0 = 0
    x0, y0 = e.p0
    r = e.radius
    ux, uy = math.cos(e.theta0), math.sin(e.theta0)
    a = c.a
    gx = 2.0 * (a * x0 - c.bx)
    gy = 2.0 * (a * y0 - c.by)
    f0 = a * (x0 * x0 + y0 * y0) - 2.0 * (c.bx * x0 + c.by * y0) + c.k
    B = r * (gx * ux + gy * uy) - 2.0 * a * r * r
    C = r * (gy * ux - gx * uy)
    qa = f0 - 2.0 * B
    qb = 2.0 * C
    qc = f0
    if qa == 0.0:
        if qb == 0.0:
            return []
        ws = [-qc / qb]
    else:
        disc = qb * qb - 4.0 * qa * qc
        if disc <= 0.0:
            return []
        sq = math.sqrt(disc)
        q = -0.5 * (qb + math.copysign(sq, qb))
        ws = [q / qa, qc / q if q != 0.0 else q / qa]
    span = e.span
    out = []
    for w in ws:
        sigma = 2.0 * math.atan(w)
        if span >= 0:
            s = (sigma % TWO_PI) / span
        else:
            s = ((-sigma) % TWO_PI) / -span
        if T_EPS < s < 1.0 - T_EPS:
            out.append(s)
    out.sort()
    if len(out) == 2 and (out[1] - out[0]) * abs(span) <= TANGENT_TOL:
        return []
    return out


def _arc_side(e: Arc, c: CircleConstraint, f0: float, f1: float) -> Optional[bool]:
    """True/False when ``f`` keeps a strict sign on the whole arc, else None.

    On the arc's circle ``f`` is affine in ``x``, so with sigma the angle from
    ``p0`` it reads ``f0 - B + R cos(sigma - phi)``.
    """
    x0, y0 = e.p0
    r = e.radius
    ux, uy = math.cos(e.theta0), math.sin(e.theta0)
    a = c.a
    gx = 2.0 * (a * x0 - c.bx)
    gy = 2.0 * (a * y0 - c.by)
    B = r * (gx * ux + gy * uy) - 2.0 * a * r * r
    C = r * (gy * ux - gx * uy)
    R = math.hypot(B, C)
    mid = f0 - B
    if mid + R < -ON_CURVE_TOL:
        return True
    if mid - R > ON_CURVE_TOL:
        return False
    phi = e.theta0 + math.atan2(C, B)
    hi = mid + R if e.contains_angle(phi) else max(f0, f1)
    if hi < -ON_CURVE_TOL:
        return True
    lo = mid - R if e.contains_angle(phi + math.pi) else min(f0, f1)
    if lo > ON_CURVE_TOL:
        return False
    return None


def _on_curve(e: ArcEdge, c: CircleConstraint, f0=None, fm=None, f1=None) -> bool:
    f = c.__call__
    if f0 is None:
        f0, fm, f1 = f(*e.p0), f(*e.point_at(0.5)), f(*e.p1)
    if abs(f0) <= ON_CURVE_TOL and abs(fm) <= ON_CURVE_TOL and abs(f1) <= ON_CURVE_TOL:
        return e.is_arc or abs(f(*e.point_at(0.25))) <= ON_CURVE_TOL
    return False


def _split(e: ArcEdge, c: CircleConstraint, f0=None, f1=None):
    """Split ``e`` at its crossings with ``c``; yield ``(piece, inside)`` pairs.

    ``f0`` and ``f1`` may carry the constraint values at the endpoints.
    """
    a, bx, by, k = c.a, c.bx, c.by, c.k
    p0, p1 = e.p0, e.p1
    if f0 is None:
        f0 = a * (p0[0] * p0[0] + p0[1] * p0[1]) - 2.0 * (bx * p0[0] + by * p0[1]) + k
    if f1 is None:
        f1 = a * (p1[0] * p1[0] + p1[1] * p1[1]) - 2.0 * (bx * p1[0] + by * p1[1]) + k
    mx, my = e.point_at(0.5)
    fm = a * (mx * mx + my * my) - 2.0 * (bx * mx + by * my) + k
    if abs(fm) <= ON_CURVE_TOL and abs(f0) <= ON_CURVE_TOL and abs(f1) <= ON_CURVE_TOL and _on_curve(e, c, f0, fm, f1):
        return [(e, True)]
    ts = _roots_arc(e, c) if e.is_arc else _roots_segment(e, c)
    if not ts:
        return [(e, fm <= 0.0)]
    f = c.__call__
    out = []
    s_prev, q_prev = 0.0, p0
    for t in ts + [1.0]:
        q = p1 if t == 1.0 else e.point_at(t)
        mid = e.point_at(0.5 * (s_prev + t))
        out.append((e.sub(s_prev, t, q_prev, q), f(*mid) <= 0.0))
        s_prev, q_prev = t, q
    return out


class _Curve:
    """Parametrization of the constraint curve used to join chain ends."""

    def __init__(self, c: CircleConstraint):
        self.c = c
        if c.is_circle:
            self.center = c.center
            self.radius = c.radius
            self.sign = 1.0 if c.a > 0 else -1.0
            self.period = TWO_PI
            self.tol = 1e-11 / self.radius
        else:
            # traversal keeps the region on the left
            self.tx, self.ty = c.by, -c.bx
            n = math.hypot(self.tx, self.ty)
            self.tx /= n
            self.ty /= n
            self.period = None
            self.tol = 1e-11

    def param(self, p: Point) -> float:
        if self.period is None:
            return self.tx * p[0] + self.ty * p[1]
        return math.atan2(p[1] - self.center[1], p[0] - self.center[0])

    def forward(self, s_from: float, s_to: float) -> float:
        if self.period is None:
            d = s_to - s_from
            if d < 0.0:
                # a line never wraps around: entries behind the exit are unreachable
                return 0.0 if d >= -self.tol else math.inf
            return d
        d = (self.sign * (s_to - s_from)) % TWO_PI
        return 0.0 if d > TWO_PI - self.tol else d

    def connector(self, p_from: Point, p_to: Point, s_from: float, offset: float) -> Optional[ArcEdge]:
        if offset <= 0.0:
            return None
        if self.period is None:
            return Segment(p_from, p_to, self.c.owner)
        if offset < 0.5 * math.pi:
            # the chord gives the small sweep to full relative precision
            chord = math.hypot(p_to[0] - p_from[0], p_to[1] - p_from[1])
            offset = 2.0 * math.asin(min(1.0, 0.5 * chord / self.radius))
        return Arc(p_from, p_to, self.center, self.radius, s_from, self.sign * offset, self.c.owner)


def _circle_in_box(c: CircleConstraint, poly: ArcPolygon) -> bool:
    # necessary for the circle to sit strictly inside the polygon
    x0, x1, y0, y1 = poly.bbox()
    (cx, cy), r = c.center, c.radius
    return x0 < cx - r and cx + r < x1 and y0 < cy - r and cy + r < y1


def clip(poly: ArcPolygon, c: CircleConstraint) -> ArcPolygon:
    """Intersect ``poly`` with the region of ``c``.

    Boundary edges are split where they cross the constraint curve, pieces are
    classified by the sign of ``f`` at their midpoints, and the surviving chains
    are closed with new edges along the curve, tagged with ``c.owner``.
    """
    if c.kind == ALL or poly.is_empty:
        return poly
    if c.kind == EMPTY:
        return ArcPolygon.empty()

    kept_loops: List[List[ArcEdge]] = []
    chains: List[List[ArcEdge]] = []
    for loop in poly.loops:
        # endpoint values are shared by consecutive edges
        fv = [c(*e.p0) for e in loop]
        pieces = []
        n = len(loop)
        convex, concave = c.a >= 0.0, c.a <= 0.0
        for i, e in enumerate(loop):
            fa = fv[i]
            fb = fv[(i + 1) % n] if loop[(i + 1) % n].p0 == e.p1 else None
            if fb is not None:
                if e.is_arc:
                    side = _arc_side(e, c, fa, fb)
                    if side is not None:
                        pieces.append((e, side))
                        continue
                # f restricted to a segment is convex (a >= 0) or concave (a <= 0)
                elif convex and fa < -ON_CURVE_TOL and fb < -ON_CURVE_TOL:
                    pieces.append((e, True))
                    continue
                elif concave and fa > ON_CURVE_TOL and fb > ON_CURVE_TOL:
                    pieces.append((e, False))
                    continue
            pieces.extend(_split(e, c, fa, fb))
        flags = [fl for _, fl in pieces]
        if all(flags):
            kept_loops.append([p for p, _ in pieces])
            continue
        if not any(flags):
            continue
        n = len(pieces)
        start = next(i for i in range(n) if flags[i] and not flags[i - 1])
        pieces = pieces[start:] + pieces[:start]
        cur: List[ArcEdge] = []
        for p, fl in pieces:
            if fl:
                cur.append(p)
            elif cur:
                chains.append(cur)
                cur = []
        if cur:
            chains.append(cur)

    if not chains:
        # a boundary edge on the curve means the circle cannot lie strictly inside
        if c.is_circle and _circle_in_box(c, poly) and not any(_on_curve(e, c) for lp in kept_loops for e in lp):
            cx, cy = c.center
            probe = (cx + c.radius, cy)
            if winding_number(poly, probe) > 0.5:
                kept_loops.append([full_circle(c.center, c.radius, c.a > 0, c.owner)])
        return ArcPolygon(kept_loops)

    curve = _Curve(c)
    s_entry = [curve.param(ch[0].p0) for ch in chains]
    s_exit = [curve.param(ch[-1].p1) for ch in chains]
    available = list(range(len(chains)))
    succ = {}
    for i in range(len(chains)):
        best, best_off = None, math.inf
        for j in available:
            off = curve.forward(s_exit[i], s_entry[j])
            if off < best_off:
                best, best_off = j, off
        available.remove(best)
        succ[i] = (best, curve.connector(chains[i][-1].p1, chains[best][0].p0, s_exit[i], best_off))

    seen = set()
    for i in range(len(chains)):
        if i in seen:
            continue
        loop: List[ArcEdge] = []
        j = i
        while j not in seen:
            seen.add(j)
            loop.extend(chains[j])
            nxt, conn = succ[j]
            if conn is not None:
                loop.append(conn)
            j = nxt
        kept_loops.append(loop)
    return ArcPolygon(kept_loops)


# ---------------------------------------------------------------------------
# measures


def _seg_correction(r: float, span: float) -> float:
    """Signed area between an arc and its chord, ``r^2 (phi - sin phi) / 2``."""
    if abs(span) < 1e-3:
        s2 = span * span
        return 0.5 * r * r * span * s2 * (1.0 / 6.0 - s2 * (1.0 / 120.0 - s2 / 5040.0))
    return 0.5 * r * r * (span - math.sin(span))


def _loop_area(loop: Sequence[ArcEdge]) -> float:
    acc = 0.0
    for e in loop:
        (x0, y0), (x1, y1) = e.p0, e.p1
        acc += 0.5 * (x0 * y1 - x1 * y0)
        if e.is_arc:
            acc += _seg_correction(e.radius, e.span)
    return acc


def _bbox(loops) -> Tuple[float, float, float, float]:
    xs: List[float] = []
    ys: List[float] = []
    for lp in loops:
        for e in lp:
            xs.append(e.p0[0])
            ys.append(e.p0[1])
            if e.is_arc:
                cx, cy = e.center
                r = e.radius
                for k, (ux, uy) in enumerate(((1, 0), (0, 1), (-1, 0), (0, -1))):
                    if e.contains_angle(k * 0.5 * math.pi):
                        xs.append(cx + r * ux)
                        ys.append(cy + r * uy)
    if not xs:
        return (math.inf, -math.inf, math.inf, -math.inf)
    return (min(xs), max(xs), min(ys), max(ys))


def _arc_points(e: Arc, s: np.ndarray) -> np.ndarray:
    half = 0.5 * s * e.span
    chord = 2.0 * e.radius * np.sin(half)
    th = e.theta0 + half
    return np.column_stack([e.p0[0] - chord * np.sin(th), e.p0[1] + chord * np.cos(th)])


def edge_quadrature(edges: Sequence[ArcEdge]):
    """Composite Gauss-Legendre nodes on every edge.

    Returns ``(points, weights, edge_index, unit_tangent)`` with arc-length
    weights.  Arcs get one order-16 panel per ``pi/16`` of angle, segments 16
    equal panels.
    """
    pts, wts, idx, tan = [], [], [], []
    for n, e in enumerate(edges):
        if e.is_arc:
            k = max(1, math.ceil(abs(e.span) / (math.pi / 16) - 1e-12))
        else:
            k = 16
        s = ((np.arange(k)[:, None] + _GL_X01[None, :]) / k).ravel()
        w = np.tile(_GL_W01, k) / k
        if e.is_arc:
            p = _arc_points(e, s)
            th = e.theta0 + s * e.span
            sg = 1.0 if e.span > 0 else -1.0
            t = np.column_stack([-np.sin(th) * sg, np.cos(th) * sg])
            w = w * e.radius * abs(e.span)
        else:
            (x0, y0), (x1, y1) = e.p0, e.p1
            p = np.column_stack([x0 + s * (x1 - x0), y0 + s * (y1 - y0)])
            L = e.length()
            t = np.tile([(x1 - x0) / L, (y1 - y0) / L] if L > 0 else [1.0, 0.0], (s.size, 1))
            w = w * L
        pts.append(p)
        wts.append(w)
        idx.append(np.full(s.size, n))
        tan.append(t)
    if not pts:
        z = np.zeros((0, 2))
        return z, np.zeros(0), np.zeros(0, dtype=int), z
    return np.vstack(pts), np.concatenate(wts), np.concatenate(idx), np.vstack(tan)


def boundary_integral(poly: ArcPolygon, owner: int, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """Integral of ``f`` with respect to arc length over the edges tagged ``owner``."""
    edges = [e for e in poly.edges if e.owner == owner]
    if not edges:
        return 0.0
    pts, w, _, _ = edge_quadrature(edges)
    return float(np.dot(w, np.asarray(f(pts), dtype=float)))


def _green_mass(edges, density, x_ref: float, outer: int, inner: int) -> float:
    # mass = closed integral of Phi dy with Phi(x, y) = int_{x_ref}^{x} rho(s, y) ds
    total = 0.0
    for e in edges:
        if e.is_arc:
            k = outer * max(1, math.ceil(abs(e.span) / (math.pi / 8)))
        else:
            k = outer
        s = ((np.arange(k)[:, None] + _GL_X01[None, :]) / k).ravel()
        w = np.tile(_GL_W01, k) / k
        if e.is_arc:
            x, y = _arc_points(e, s).T
            dy = e.radius * np.cos(e.theta0 + s * e.span) * e.span
        else:
            (x0, y0), (x1, y1) = e.p0, e.p1
            x = x0 + s * (x1 - x0)
            y = y0 + s * (y1 - y0)
            dy = np.full_like(s, y1 - y0)
        u = ((np.arange(inner)[:, None] + _GL_X01[None, :]) / inner).ravel()
        wu = np.tile(_GL_W01, inner) / inner
        xs = x_ref + (x - x_ref)[:, None] * u[None, :]
        pts = np.stack([xs, np.broadcast_to(y[:, None], xs.shape)], axis=-1)
        phi = (density(pts) * wu[None, :]).sum(axis=1) * (x - x_ref)
        total += float(np.dot(w * dy, phi))
    return total


def area(poly: ArcPolygon, density=None) -> float:
    """Mass of ``poly`` under ``density`` (plain area when ``density`` is None).

    Uniform densities use the exact chord-plus-circular-segment formula; a
    callable density is integrated through Green's theorem with nested
    Gauss-Legendre rules refined until the relative change drops below 1e-8.
    """
    if poly.is_empty:
        return 0.0
    if density is None:
        return poly.signed_area()
    if density.is_uniform:
        return density.constant * poly.signed_area()
    edges = poly.edges
    x_ref = poly.bbox()[0]
    prev = _green_mass(edges, density, x_ref, 1, 1)
    level = 2
    while level <= 64:
        cur = _green_mass(edges, density, x_ref, level, level)
        if abs(cur - prev) <= 1e-8 * max(abs(cur), 1e-300):
            return cur
        prev = cur
        level *= 2
    return prev


# ---------------------------------------------------------------------------
# membership


def winding_number(poly: ArcPolygon, x: Point) -> float:
    """Winding number of the boundary around ``x``.

    Each loop is split into its chord polygon plus one circular segment per
    arc; the segment contributes its orientation when ``x`` lies inside it.
    """
    px, py = x
    total = 0.0
    for lp in poly.loops:
        ang = 0.0
        extra = 0
        for e in lp:
            ax, ay = e.p0[0] - px, e.p0[1] - py
            bx, by = e.p1[0] - px, e.p1[1] - py
            ang += math.atan2(ax * by - ay * bx, ax * bx + ay * by)
            if e.is_arc and _in_circular_segment(e, px, py):
                extra += 1 if e.span > 0 else -1
        total += ang / TWO_PI + extra
    return total


def _in_circular_segment(e: Arc, px: float, py: float) -> bool:
    cx, cy = e.center
    if (px - cx) ** 2 + (py - cy) ** 2 >= e.radius**2:
        return False
    if abs(e.span) >= TWO_PI - 1e-12:
        return True
    (x0, y0), (x1, y1) = e.p0, e.p1
    mx, my = e.point_at(0.5)
    side_m = (x1 - x0) * (my - y0) - (y1 - y0) * (mx - x0)
    side_p = (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0)
    return side_m * side_p > 0
