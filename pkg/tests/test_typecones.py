"""Type detection, local cones, polynomial systems, sampling coverage."""

import numpy as np
import pytest

import conevol as cv
from conevol.errors import NonSimpleType, ZeroVolume

from conftest import SQRT2, make_trapezoid, random_normal_matrix


class TestDetectType:
    def test_dilates_share_type(self, square):
        a = cv.detect_type(square, np.ones(4))
        b = cv.detect_type(square, np.array([2.0, 1.0, 1.0, 1.0]))
        assert a.type_id == b.type_id
        assert a.simple

    def test_trapezoid_two_types(self, trapezoid):
        t_trap = cv.detect_type(trapezoid, np.array([0.2, 1.0, 1.0, 1.0]))
        t_tri = cv.detect_type(trapezoid, np.array([5.0, 1.0, 1.0, 1.0]))
        assert t_trap.type_id != t_tri.type_id
        assert t_trap.simple and t_tri.simple
        assert len(t_trap.facets_present) == 4
        assert len(t_tri.facets_present) == 3

    def test_apex_on_boundary_non_simple(self):
        U, (l2, l4) = make_trapezoid(-0.5, 1.0)
        b1_star = (l2 + l4) / 1.5  # separating hyperplane at b2 = b4 = 1
        info = cv.detect_type(U, np.array([b1_star, 1.0, 1.0, 1.0]))
        assert not info.simple

    def test_zero_volume(self, square):
        with pytest.raises(ZeroVolume):
            cv.detect_type(square, np.zeros(4))

    def test_locally_constant_on_segments(self, trapezoid):
        rng = np.random.default_rng(67)
        b0 = np.array([0.2, 1.0, 1.0, 1.0])
        ref = cv.detect_type(trapezoid, b0).type_id
        direction = rng.uniform(-0.05, 0.05, 4)
        for t in np.linspace(0.0, 1.0, 17):
            assert cv.detect_type(trapezoid, b0 + t * direction).type_id == ref


class TestLocalTypeCone:
    def test_agrees_with_planar_rows(self, pentagon):
        b = np.array([0.54, 0.97, 0.15, 0.54, 0.57])
        rows, _ = cv.local_type_cone(pentagon, b)
        planar = cv.planar_type_cone(cv.order_ccw(pentagon)).rows
        # full-edge type: every local row appears among the planar rows
        for row in rows:
            r = row / np.linalg.norm(row)
            dists = [
                np.linalg.norm(r - p / np.linalg.norm(p)) for p in planar
            ]
            assert min(dists) <= 1e-9

    def test_trapezoid_recovers_separating_row(self):
        U, (l2, l4) = make_trapezoid(-0.75, 1.25)
        rows, _ = cv.local_type_cone(U, np.array([0.2, 1.0, 1.0, 1.0]))
        target = np.array([-2.0, l2, 0.0, l4])
        target /= np.linalg.norm(target)
        best = min(
            float(np.linalg.norm(row / np.linalg.norm(row) - target))
            for row in rows
        )
        assert best <= 1e-9

    def test_stable_under_interior_perturbation(self, square):
        rows_a, _ = cv.local_type_cone(square, np.ones(4))
        rows_b, _ = cv.local_type_cone(square, np.array([1.01, 0.99, 1.0, 1.0]))
        sort = lambda rows: np.array(sorted(map(tuple, np.round(rows, 9))))
        assert np.allclose(sort(rows_a), sort(rows_b), atol=1e-9)

    def test_non_simple_rejected(self):
        U, (l2, l4) = make_trapezoid(-0.5, 1.0)
        b1_star = (l2 + l4) / 1.5
        with pytest.raises(NonSimpleType):
            cv.local_type_cone(U, np.array([b1_star, 1.0, 1.0, 1.0]))


class TestBuildSystem:
    def test_square_volume_product(self, square):
        system = cv.build_system(square, np.ones(4))
        expect = (cv.Polynomial.variable(4, 0) + cv.Polynomial.variable(4, 2)) * (
            cv.Polynomial.variable(4, 1) + cv.Polynomial.variable(4, 3)
        )
        assert system.volume_poly.allclose(expect, 1e-12)

    def test_cube_volume_product(self, cube3):
        system = cv.build_system(cube3, np.ones(6), seed=0)
        expect = cv.Polynomial.constant(6, 1.0)
        for i in range(3):
            expect = expect * (
                cv.Polynomial.variable(6, i) + cv.Polynomial.variable(6, 3 + i)
            )
        assert system.volume_poly.allclose(expect, 1e-9)

    def test_sheared_parallelepiped_det_scaling(self):
        v1 = np.array([1.0, 0.0, 0.0])
        v2 = np.array([1.0, 2.0, 0.0]) / np.sqrt(5)
        v3 = np.array([0.0, 1.0, 3.0]) / np.sqrt(10)
        V = np.column_stack([v1, v2, v3])
        U = cv.NormalMatrix(np.column_stack([V, -V]))
        system = cv.build_system(U, np.ones(6), seed=1)
        expect = cv.Polynomial.constant(6, 1.0)
        for i in range(3):
            expect = expect * (
                cv.Polynomial.variable(6, i) + cv.Polynomial.variable(6, 3 + i)
            )
        expect = expect * (1.0 / abs(np.linalg.det(V)))
        assert system.volume_poly.allclose(expect, 1e-9)

    def test_pentagon_couplings(self, pentagon):
        system = cv.build_system(pentagon, np.array([0.54, 0.97, 0.15, 0.54, 0.57]))
        lin = cv.Polynomial.linear
        var = cv.Polynomial.variable
        assert system.coupling[1].allclose(lin([1, 0, 1, 0, 0]) * var(5, 1, 0.5), 1e-12)
        assert system.coupling[2].allclose(lin([0, 1, 0, 1, 0]) * var(5, 2, 0.5), 1e-12)
        assert system.coupling[0].allclose(
            lin([-1, 1, 0, 0, SQRT2]) * var(5, 0, 0.5), 1e-12
        )
        assert system.coupling[3].allclose(
            lin([0, 0, 1, -1, SQRT2]) * var(5, 3, 0.5), 1e-12
        )
        assert system.coupling[4].allclose(
            lin([SQRT2, 0, 0, SQRT2, -2]) * var(5, 4, 0.5), 1e-12
        )

    def test_degree_bounds(self, trapezoid, cube3):
        for U, b in ((trapezoid, np.array([0.2, 1.0, 1.0, 1.0])), (cube3, np.ones(6))):
            system = cv.build_system(U, b, seed=2)
            assert system.volume_poly.degree() <= U.n
            for p in system.facet_polys:
                assert p.degree() <= U.n - 1

    def test_faithfulness_planar_exact(self, trapezoid):
        rng = np.random.default_rng(71)
        for b0 in (np.array([0.2, 1.0, 1.0, 1.0]), np.array([5.0, 1.0, 1.0, 1.0])):
            system = cv.build_system(trapezoid, b0)
            count = 0
            while count < 100:
                cand = b0 * (1 + 0.2 * rng.uniform(-1, 1, 4))
                try:
                    info = cv.detect_type(trapezoid, cand)
                except ZeroVolume:
                    continue
                if info.type_id != system.type_id:
                    continue
                P = cv.build_polytope(trapezoid, cand)
                assert abs(system.volume_poly(cand) - P.volume) < 1e-12
                gamma = cv.cone_volume_vector(P).gamma
                assert np.allclose(system.gamma_at(cand), gamma, atol=1e-12)
                count += 1

    def test_faithfulness_interpolated(self, cube3):
        rng = np.random.default_rng(73)
        system = cv.build_system(cube3, np.ones(6), seed=3)
        for _ in range(100):
            cand = 1 + 0.3 * rng.uniform(-1, 1, 6)
            P = cv.build_polytope(cube3, cand)
            assert abs(system.volume_poly(cand) - P.volume) < 1e-7
            assert np.allclose(
                [p(cand) for p in system.facet_polys], P.facet_measures, atol=1e-7
            )

    def test_non_simple_rejected(self):
        U, (l2, l4) = make_trapezoid(-0.5, 1.0)
        b1_star = (l2 + l4) / 1.5
        with pytest.raises(NonSimpleType):
            cv.build_system(U, np.array([b1_star, 1.0, 1.0, 1.0]))


class TestSampling:
    def test_counts(self, square, trapezoid, cube3):
        assert len(cv.sample_type_cones(square, 40, seed=0)) == 1
        assert len(cv.sample_type_cones(trapezoid, 80, seed=0)) == 2
        assert len(cv.sample_type_cones(cube3, 25, seed=0)) == 1

    def test_simplex_single_type(self):
        rng = np.random.default_rng(79)
        for n in (2, 3):
            U = random_normal_matrix(rng, n, n + 1)
            assert len(cv.sample_type_cones(U, 30, seed=0)) == 1

    def test_deterministic_under_seed(self, trapezoid):
        a = cv.sample_type_cones(trapezoid, 50, seed=5)
        b = cv.sample_type_cones(trapezoid, 50, seed=5)
        assert [t for t, _ in a] == [t for t, _ in b]
        assert all(np.array_equal(x, y) for (_, x), (_, y) in zip(a, b))

    def test_representatives_are_interior(self, trapezoid):
        for type_id, b in cv.sample_type_cones(trapezoid, 50, seed=1):
            info = cv.detect_type(trapezoid, b)
            assert info.simple
            assert info.type_id == type_id

    def test_full_facet_filter(self, trapezoid):
        discovered = cv.sample_type_cones(trapezoid, 80, seed=0)
        kept = cv.filter_full_facet_types(trapezoid, discovered)
        assert len(discovered) == 2
        assert len(kept) == 1
        type_id, b = kept[0]
        assert cv.build_polytope(trapezoid, b).has_all_facets()
