import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gjnewton.genfun import Density
from gjnewton.geometry import (
    ALL,
    EMPTY,
    HALFPLANE,
    INSIDE,
    OUTSIDE,
    Arc,
    ArcPolygon,
    CircleConstraint,
    Segment,
    area,
    boundary_integral,
    clip,
    constraint_from_mobius,
    winding_number,
)

UNIT = ArcPolygon.rectangle(0, 1, 0, 1)


class TestConstraintFromMobius:
    def test_equal_weights_give_bisector(self):
        c = constraint_from_mobius(0.25, 1.0, (0, 0), 0.25, 1.0, (1, 0))
        assert c.kind == HALFPLANE
        assert c.normal == pytest.approx((1.0, 0.0))
        assert c.offset == pytest.approx(0.5)

    def test_outside_disk(self):
        c = constraint_from_mobius(0.2, 1.25, (0, 0), 0.25, 1.0, (1, 0))
        assert c.kind == OUTSIDE
        assert c.center == pytest.approx((5.0, 0.0))
        assert c.radius == pytest.approx(math.sqrt(15))

    def test_empty(self):
        c = constraint_from_mobius(0.25, 1.0, (0, 0), 0.125, 2.0, (1, 0))
        assert c.kind == EMPTY

    def test_inside_disk(self):
        # swapping roles of the outside-disk example gives its complement
        c = constraint_from_mobius(0.25, 1.0, (1, 0), 0.2, 1.25, (0, 0))
        assert c.kind == INSIDE
        assert c.center == pytest.approx((5.0, 0.0))
        assert c.radius == pytest.approx(math.sqrt(15))

    def test_identical_points_equal_weights(self):
        # the region reduces to mu_i >= mu_j
        assert constraint_from_mobius(0.5, 2.0, (0, 0), 0.5, 1.0, (0, 0)).kind == ALL
        assert constraint_from_mobius(0.5, 1.0, (0, 0), 0.5, 2.0, (0, 0)).kind == EMPTY

    def test_membership_matches_inequality(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            li, lj = rng.uniform(0.05, 1, 2)
            mi, mj = rng.uniform(0.5, 3, 2)
            pi, pj = rng.random(2), rng.random(2)
            c = constraint_from_mobius(li, mi, pi, lj, mj, pj)
            for x in rng.uniform(-3, 3, (20, 2)):
                lhs = li * np.sum((x - pi) ** 2) - mi
                rhs = lj * np.sum((x - pj) ** 2) - mj
                if abs(lhs - rhs) > 1e-9:
                    assert c.contains(x) == (lhs <= rhs)

    def test_half_plane_normal_is_unit(self):
        c = CircleConstraint.half_plane((3.0, 4.0), 2.0)
        assert math.hypot(*c.normal) == pytest.approx(1.0)
        assert c.offset == pytest.approx(0.4)


class TestClip:
    def test_half_plane(self):
        p = clip(UNIT, CircleConstraint.half_plane((1, 0), 0.5))
        assert area(p) == pytest.approx(0.5, abs=1e-15)
        assert p.bbox() == pytest.approx((0, 0.5, 0, 1))

    def test_quarter_disk(self):
        p = clip(UNIT, CircleConstraint.inside_disk((0, 0), 1.0))
        assert area(p) == pytest.approx(math.pi / 4, abs=1e-14)
        p.check_invariants()

    def test_all_is_identity(self):
        c = CircleConstraint.from_quadric(0.0, 0.0, 0.0, -1.0)
        assert c.kind == ALL
        assert clip(UNIT, c) is UNIT

    def test_empty(self):
        c = CircleConstraint.from_quadric(0.0, 0.0, 0.0, 1.0)
        assert clip(UNIT, c).is_empty

    def test_hole(self):
        p = clip(UNIT, CircleConstraint.outside_disk((0.5, 0.5), 0.2, owner=7))
        assert len(p.loops) == 2
        assert area(p) == pytest.approx(1 - 0.04 * math.pi, abs=1e-14)
        assert 7 in p.owners()

    def test_disk_strictly_inside(self):
        p = clip(UNIT, CircleConstraint.inside_disk((0.5, 0.5), 0.2, owner=3))
        assert area(p) == pytest.approx(0.04 * math.pi, abs=1e-14)
        assert p.owners() == {3}

    def test_disjoint_disk(self):
        assert clip(UNIT, CircleConstraint.inside_disk((5, 5), 1.0)).is_empty

    def test_owner_tags(self):
        p = clip(UNIT, CircleConstraint.half_plane((1, 1), 1.0, owner=11))
        assert 11 in p.owners()
        assert sum(e.length() for e in p.edges if e.owner == 11) == pytest.approx(math.sqrt(2))

    def test_lens(self):
        # two unit disks at distance 1: lens area 2 pi/3 - sqrt(3)/2
        big = ArcPolygon.rectangle(-3, 3, -3, 3)
        p = clip(clip(big, CircleConstraint.inside_disk((0, 0), 1.0)), CircleConstraint.inside_disk((1, 0), 1.0))
        assert area(p) == pytest.approx(2 * math.pi / 3 - math.sqrt(3) / 2, abs=1e-13)
        p.check_invariants()

    def test_clip_splits_into_two_components(self):
        # an outside-disk constraint cutting a thin strip removes its middle
        strip = ArcPolygon.rectangle(-2, 2, -0.1, 0.1)
        p = clip(strip, CircleConstraint.outside_disk((0, 0), 1.0))
        assert len(p.loops) == 2
        seg = 1.0**2 * math.asin(0.1) + 0.1 * math.sqrt(1 - 0.01)  # half-area of the disk band
        assert area(p) == pytest.approx(0.8 - 2 * seg, abs=1e-13)


def _random_constraint(draw_or_rng):
    rng = draw_or_rng
    kind = rng.integers(0, 3)
    if kind == 0:
        th = rng.uniform(0, 2 * math.pi)
        return CircleConstraint.half_plane((math.cos(th), math.sin(th)), rng.uniform(-0.5, 1.5))
    c, r = rng.uniform(-0.5, 1.5, 2), rng.uniform(0.1, 1.5)
    return CircleConstraint.inside_disk(c, r) if kind == 1 else CircleConstraint.outside_disk(c, r)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_clip_monotone_and_idempotent(seed):
    rng = np.random.default_rng(seed)
    p = UNIT
    for _ in range(3):
        c = _random_constraint(rng)
        q = clip(p, c)
        q.check_invariants()
        assert area(q) <= area(p) + 1e-12
        assert area(clip(q, c)) == pytest.approx(area(q), abs=1e-12)
        p = q


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_clip_matches_sampling(seed):
    rng = np.random.default_rng(seed)
    cs = [_random_constraint(rng) for _ in range(3)]
    p = UNIT
    for c in cs:
        p = clip(p, c)
    x = rng.random((20000, 2))
    inside = np.ones(len(x), bool)
    for c in cs:
        inside &= c(x[:, 0], x[:, 1]) <= 0
    # binomial standard error is at most 0.5/sqrt(n)
    assert abs(area(p) - inside.mean()) <= 5 * 0.5 / math.sqrt(len(x))


class TestArea:
    def test_disk(self):
        assert area(ArcPolygon.disk((0.3, -2), 1.0)) == pytest.approx(math.pi, abs=1e-12)

    def test_scaled_square(self):
        assert area(UNIT, Density(constant=0.25)) == pytest.approx(0.25)

    def test_empty(self):
        assert area(ArcPolygon.empty()) == 0.0
        assert area(ArcPolygon.empty(), Density(constant=3.0)) == 0.0

    def test_callable_density_disk(self):
        # int_{|x|<1} |x|^2 = pi/2
        d = Density(func=lambda x: (x**2).sum(-1))
        assert area(ArcPolygon.disk((0, 0), 1.0), d) == pytest.approx(math.pi / 2, rel=1e-9)

    def test_callable_density_clipped(self):
        d = Density(func=lambda x: x[..., 0])
        p = clip(UNIT, CircleConstraint.inside_disk((0, 0), 1.0))
        # int over the quarter disk of x dx dy = 1/3
        assert area(p, d) == pytest.approx(1 / 3, rel=1e-9)

    def test_huge_radius_arc(self):
        # nearly flat cap peaking at y = 0.5: area 0.5 - 1/(24 R) + O(R^-3)
        R = 1e5 + 0.5
        p = clip(UNIT, CircleConstraint.inside_disk((0.5, 0.5 - R), R))
        assert area(p) == pytest.approx(0.5 - 1 / (24 * R), abs=1e-12)


class TestBoundaryIntegral:
    def test_circle_length(self):
        p = ArcPolygon.disk((1, 1), 0.7, owner=4)
        assert boundary_integral(p, 4, lambda x: np.ones(len(x))) == pytest.approx(2 * math.pi * 0.7, rel=1e-13)

    def test_segment_linear(self):
        p = ArcPolygon([[Segment((0, 0), (1, 0), 5), Segment((1, 0), (0, 0), 6)]])
        assert boundary_integral(p, 5, lambda x: x[:, 0]) == pytest.approx(0.5, rel=1e-14)

    def test_absent_owner(self):
        assert boundary_integral(UNIT, 99, lambda x: np.ones(len(x))) == 0.0

    def test_smooth_function_on_arc(self):
        # f = x^2 on the unit circle integrates to pi
        p = ArcPolygon.disk((0, 0), 1.0, owner=1)
        assert boundary_integral(p, 1, lambda x: x[:, 0] ** 2) == pytest.approx(math.pi, rel=1e-10)


def test_winding_number_matches_inequalities():
    rng = np.random.default_rng(9)
    cs = [CircleConstraint.inside_disk((0.4, 0.4), 0.6), CircleConstraint.outside_disk((0.9, 0.2), 0.3)]
    p = UNIT
    for c in cs:
        p = clip(p, c)
    x = rng.random((10**4, 2))
    f = np.max([c(x[:, 0], x[:, 1]) for c in cs], axis=0)
    f = np.maximum(f, np.max([-x[:, 0], x[:, 0] - 1, -x[:, 1], x[:, 1] - 1], axis=0))
    for xi, fi in zip(x, f):
        if abs(fi) > 1e-9:
            assert p.contains(tuple(xi)) == (fi < 0)


def test_arc_endpoints_consistent():
    a = Arc((1.0, 0.0), (0.0, 1.0), (0.0, 0.0), 1.0, 0.0, math.pi / 2, 0)
    assert a.point_at(1.0) == pytest.approx((0.0, 1.0), abs=1e-15)
    assert a.length() == pytest.approx(math.pi / 2)
    assert winding_number(ArcPolygon.disk((0, 0), 1.0), (0.2, 0.1)) == pytest.approx(1.0)
