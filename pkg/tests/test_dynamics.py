import numpy as np
import pytest

from cayleyset.cayley import cayley_gamma
from cayleyset.dynamics import (
    FORWARD,
    RETURN,
    correspondence_member,
    e_curve_residual,
    initial_state,
    orbit,
    poncelet_step,
    random_start_points,
    residuals,
    tangents_from_point,
    trace,
    triangle_closure,
)
from cayleyset.errors import BranchCollapse
from cayleyset.moduli import act
from cayleyset.numeric import ProjPoint, proj_distance
from cayleyset.pencil import (
    ConicPair,
    circles_pair,
    intersection_points,
    random_transform,
    random_transverse_pair,
)


def _state_close(a, b, eps=1e-9):
    return a.point.distance(b.point) < eps and a.line.distance(b.line) < eps


class TestStep:
    def test_return_undoes_forward(self, chapple):
        for p0 in random_start_points(chapple, seed=3, count=5):
            s0 = initial_state(chapple, p0)
            s1 = poncelet_step(chapple, s0, FORWARD)
            back = poncelet_step(chapple, s1, RETURN)
            assert _state_close(back, s0)

    def test_residuals_along_chapple_orbit(self, chapple):
        for p0 in random_start_points(chapple, count=20):
            for s in orbit(chapple, initial_state(chapple, p0), 6):
                assert max(s.residuals(chapple)) < 1e-9

    def test_step_leaves_incoming_line(self, negative):
        p0 = random_start_points(negative, count=1)[0]
        s0 = initial_state(negative, p0)
        s1 = poncelet_step(negative, s0)
        assert s1.line.distance(s0.line) > 1e-6
        assert s1.history == (FORWARD,)

    def test_equivariance(self, rng):
        pair = random_transverse_pair(rng)
        A = random_transform(rng)
        moved = act(A, pair)
        for p0 in random_start_points(pair, count=5):
            s = initial_state(pair, p0)
            t = type(s)(point=ProjPoint(np.linalg.solve(A, s.point.coords)), line=ProjPoint(A.T @ s.line.coords))
            assert max(t.residuals(moved)) < 1e-9
            a, b = poncelet_step(pair, s), poncelet_step(moved, t)
            assert b.point.distance(np.linalg.solve(A, a.point.coords)) < 1e-8
            assert b.line.distance(A.T @ a.line.coords) < 1e-8

    def test_unknown_branch(self, chapple):
        s = initial_state(chapple, random_start_points(chapple, count=1)[0])
        with pytest.raises(ValueError):
            poncelet_step(chapple, s, "sideways")

    def test_collapse_on_common_point(self, negative):
        p = intersection_points(negative)[0]
        with pytest.raises(BranchCollapse):
            tangents_from_point(negative.D.matrix, p.coords)


class TestClosure:
    @pytest.mark.parametrize("which", ["cayley_diag", "chapple"])
    def test_closes(self, which, request):
        pair = request.getfixturevalue(which)
        for p0 in random_start_points(pair, count=20):
            assert triangle_closure(pair, p0) < 1e-8

    def test_negative_does_not_close(self, negative):
        for p0 in random_start_points(negative, count=20):
            assert triangle_closure(negative, p0) > 1e-3

    def test_start_must_lie_on_c(self, chapple):
        with pytest.raises(ValueError):
            triangle_closure(chapple, [0.0, 0.0, 1.0])

    def test_closing_pair_stays_closed_after_transform(self, chapple, rng):
        A = random_transform(rng)
        moved = act(A, chapple)
        for p0 in random_start_points(moved, count=10):
            assert triangle_closure(moved, p0) < 1e-8

    @pytest.mark.parametrize("d", [0.3, 0.9, 1.2, 1.5])
    def test_porism_dichotomy(self, d):
        # circles with R = 3, r = 1: triangles exist only at d^2 = R^2 - 2Rr = 3
        pair = circles_pair(3.0, 1.0, d)
        g = abs(cayley_gamma(pair)) / np.abs(pair.sigma).max() ** 2
        assert g > 1e-2
        for p0 in random_start_points(pair, count=20):
            assert triangle_closure(pair, p0) > 1e-4

    def test_trace_record(self, chapple):
        p0 = random_start_points(chapple, count=1)[0]
        tr = trace(chapple, p0, steps=3)
        assert tr.closed and len(tr.states) == 4
        assert all(max(r) < 1e-9 for r in tr.residuals)


class TestCorrespondence:
    def test_emitted_states(self, chapple):
        p0 = random_start_points(chapple, count=1)[0]
        for s in orbit(chapple, initial_state(chapple, p0), 3):
            assert correspondence_member(chapple, s.point, s.line)

    def test_point_off_tangent(self, chapple):
        pts = random_start_points(chapple, count=2)
        a, b = initial_state(chapple, pts[0]), initial_state(chapple, pts[1])
        # both pieces are valid on their own; the incidence fails
        assert residuals(chapple, a.point, b.line)[2] > 1e-6
        assert not correspondence_member(chapple, a.point, b.line)

    def test_random_draws(self, rng, chapple):
        for _ in range(100):
            p = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            l = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            assert not correspondence_member(chapple, p, l)


class TestECurve:
    def test_point_at_infinity(self, negative):
        assert e_curve_residual(negative, [1, 0], [1, 0]) == 0

    def test_ramification(self, negative):
        for r in np.roots(negative.sigma):
            assert abs(e_curve_residual(negative, [r, 1], [0, 1])) < 1e-12

    def test_generic_solved_point(self, rng):
        pair = random_transverse_pair(rng)
        for _ in range(10):
            r0, r1 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            det = np.linalg.det(r0 * pair.C.matrix + r1 * pair.D.matrix)
            # u0^2 r1^3 = u1^2 det  =>  u0 / u1 = sqrt(det / r1^3)
            u = [np.sqrt(det / r1**3), 1.0]
            r = np.array([r0, r1])
            scale = max(1.0, abs(det / r1**3)) * np.abs(pair.sigma).max()
            assert abs(e_curve_residual(pair, r, u)) < 1e-10 * scale


def test_start_points_are_seeded(chapple):
    a = random_start_points(chapple, seed=9, count=4)
    b = random_start_points(chapple, seed=9, count=4)
    assert all(proj_distance(x.coords, y.coords) == 0 for x, y in zip(a, b))
