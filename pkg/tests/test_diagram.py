import math

import numpy as np
import pytest

from gjnewton.diagram import (
    build_diagram,
    lift_all,
    lift_to_power,
    lifted_membership,
    mobius_membership,
    mobius_weights,
    power_distances,
)
from gjnewton.genfun import Domain, DomainError, quadratic_ot, reflector, square_domain, twist_gamma_bound
from gjnewton.geometry import HALFPLANE, area, constraint_from_mobius


class TestMobiusWeights:
    def test_reflector(self):
        s = reflector(3.0)
        assert mobius_weights(s, 2.0) == pytest.approx((1.0, 0.25))
        assert mobius_weights(s, 0.5) == pytest.approx((0.25, 1.0))

    def test_quadratic_is_equal_lambda(self):
        lam, mu = mobius_weights(quadratic_ot(), np.array([0.0, 1.5]))
        assert np.all(lam == 0.5)
        c = constraint_from_mobius(lam[0], mu[0], (0, 0), lam[1], mu[1], (1, 0))
        assert c.kind == HALFPLANE

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            mobius_weights(reflector(1.0), np.array([0.2, 0.0]))

    def test_weights_reproduce_G(self):
        rng = np.random.default_rng(0)
        for spec in (reflector(0.7), quadratic_ot()):
            x, y = rng.random((50, 2)), rng.random((50, 2))
            v = rng.uniform(0.05, 0.6, 50)
            lam, mu = mobius_weights(spec, v)
            np.testing.assert_allclose(-spec.G(x, y, v), lam * ((x - y) ** 2).sum(1) - mu, atol=1e-13)


class TestBuildDiagram:
    def test_single_site(self):
        dom = square_domain()
        d = build_diagram(reflector(0.5), dom, [[0.3, 0.3]], [0.2])
        assert area(d.cells[0], dom.density) == pytest.approx(1.0)
        assert d.adjacency == set()

    def test_symmetric_two_sites(self):
        dom = Domain.uniform(0, 1, 0, 1)
        d = build_diagram(quadratic_ot(), dom, [[0.25, 0.5], [0.75, 0.5]], [0.0, 0.0])
        assert d.cells[0].bbox() == pytest.approx((0, 0.5, 0, 1))
        assert d.cells[1].bbox() == pytest.approx((0.5, 1, 0, 1))
        assert d.adjacency == {(0, 1)}

    def test_empty_constraint_gives_empty_cell(self):
        # lambda = (0.25, 0.125), mu = (1, 2) are the reflector weights of v = (0.5, 0.25)
        dom = square_domain()
        d = build_diagram(reflector(0.7), dom, [[0, 0], [1, 0]], [0.5, 0.25])
        assert d.cells[0].is_empty
        assert area(d.cells[1], dom.density) == pytest.approx(1.0)
        assert d.adjacency == set()

    def test_partition_and_adjacency_symmetry(self):
        rng = np.random.default_rng(5)
        dom = square_domain()
        for n in (5, 40, 200):
            sites = rng.random((n, 2))
            spec = reflector(twist_gamma_bound(dom, sites))
            v = spec.zeta(0.5 * rng.standard_normal(n))
            d = build_diagram(spec, dom, sites, v)
            H = np.array([area(c, dom.density) for c in d.cells])
            assert abs(H.sum() - 1.0) <= 1e-9
            # every shared edge is seen from both sides with the same length
            L = {}
            for j, c in enumerate(d.cells):
                c.check_invariants()
                for e in c.edges:
                    if e.owner >= 0:
                        L[(j, e.owner)] = L.get((j, e.owner), 0.0) + e.length()
            for (j, i), length in L.items():
                assert L.get((i, j), 0.0) == pytest.approx(length, abs=1e-9)

    def test_cells_match_argmax_membership(self):
        rng = np.random.default_rng(6)
        dom = square_domain()
        sites = rng.random((15, 2))
        spec = reflector(twist_gamma_bound(dom, sites))
        v = spec.zeta(rng.standard_normal(15))
        d = build_diagram(spec, dom, sites, v)
        x = rng.uniform(-1, 1, (10**4, 2))
        g = spec.G(x[:, None, :], sites[None], v[None])
        owner = g.argmax(1)
        gap = np.sort(g, axis=1)
        band = gap[:, -1] - gap[:, -2]
        for xi, o, b in zip(x, owner, band):
            if b > 1e-9:
                assert d.cells[o].contains(tuple(xi))

    def test_bisector_centers_on_site_line(self):
        rng = np.random.default_rng(7)
        s = reflector(0.7)
        for _ in range(500):
            pi, pj = rng.random(2), rng.random(2)
            vi, vj = rng.uniform(0.01, 0.69, 2)
            (li, lj), (mi, mj) = mobius_weights(s, np.array([vi, vj]))
            c = constraint_from_mobius(li, mi, pi, lj, mj, pj)
            if c.is_circle:
                d = pj - pi
                w = np.array(c.center) - pi
                dist = abs(d[0] * w[1] - d[1] * w[0]) / np.hypot(*d)
                assert dist <= 1e-9 * max(1.0, np.hypot(*w))

    def test_decreasing_potential_grows_cell(self):
        rng = np.random.default_rng(8)
        dom = square_domain()
        sites = rng.random((12, 2))
        spec = reflector(twist_gamma_bound(dom, sites))
        for _ in range(100):
            v = spec.zeta(0.5 * rng.standard_normal(12))
            i = rng.integers(12)
            w = v.copy()
            w[i] = v[i] * rng.uniform(0.5, 1.0)
            a0 = area(build_diagram(spec, dom, sites, v).cells[i])
            a1 = area(build_diagram(spec, dom, sites, w).cells[i])
            assert a1 >= a0 - 1e-12

    def test_deterministic(self):
        rng = np.random.default_rng(9)
        dom = square_domain()
        sites = rng.random((30, 2))
        spec = reflector(twist_gamma_bound(dom, sites))
        v = spec.zeta(rng.standard_normal(30))
        a = [area(c) for c in build_diagram(spec, dom, sites, v).cells]
        b = [area(c) for c in build_diagram(spec, dom, sites, v).cells]
        assert a == b


class TestLifting:
    @pytest.mark.parametrize(
        "psi, y, p, r",
        [
            (2.0, (0, 0), (0, 0, -0.5), 0.5),
            (2.0, (1, 0), (1, 0, -0.5), 0.5),
            (1.0, (0, 0), (0, 0, -0.25), 0.5625),
        ],
    )
    def test_lift_values(self, psi, y, p, r):
        lp = lift_to_power(y, psi)
        np.testing.assert_allclose(lp.p, p, atol=1e-15)
        assert lp.r == pytest.approx(r, abs=1e-15)

    def test_lift_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            lift_to_power((0, 0), 0.0)

    def test_single_site_always_member(self):
        lifted = lift_all([[0.2, 0.3]], [0.4])
        for x in np.random.default_rng(0).uniform(-1, 1, (20, 2)):
            assert lifted_membership(x, 0, lifted)

    def test_symmetric_tie(self):
        sites = np.array([[0.0, 0.0], [1.0, 0.0]])
        lifted = lift_all(sites, [0.3, 0.3])
        for yv in (-0.7, 0.0, 0.4):
            x = np.array([0.5, yv])
            assert lifted_membership(x, 0, lifted, tol=1e-12)
            assert lifted_membership(x, 1, lifted, tol=1e-12)

    def test_agrees_with_direct_test(self):
        rng = np.random.default_rng(10)
        dom = square_domain()
        sites = rng.random((8, 2))
        spec = reflector(twist_gamma_bound(dom, sites))
        for _ in range(1000):
            v = spec.zeta(rng.standard_normal(8))
            lifted = lift_all(sites, v)
            x = rng.uniform(-1, 1, 2)
            i = int(rng.integers(8))
            g = spec.G(x[None], sites, v)
            if np.sort(g)[-1] - np.sort(g)[-2] > 1e-9:
                assert lifted_membership(x, i, lifted) == mobius_membership(spec, x, i, sites, v)

    def test_power_difference_is_mobius_difference(self):
        # the lifted power distance equals |x|^4 + |x|^2 - G pointwise
        rng = np.random.default_rng(11)
        s = reflector(0.7)
        sites = rng.random((6, 2))
        v = rng.uniform(0.05, 0.69, 6)
        lifted = lift_all(sites, v)
        for x in rng.uniform(-1, 1, (100, 2)):
            x2 = x @ x
            expect = x2 * x2 + x2 - s.G(x[None], sites, v)
            np.testing.assert_allclose(power_distances(x, lifted), expect, atol=1e-12)
