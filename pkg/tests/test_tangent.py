import random
from fractions import Fraction as F

import pytest

from tangentcert.intervals import IntervalUnion
from tangentcert.piecewise import (C1Fn, MonotoneError, pl_constant,
                                   pl_from_points)
from tangentcert.tangent import (affine_at, ball_in_envelope, bracket_covers,
                                 envelope_member, homotopy_residual,
                                 limit_consistency, rect_bracket, sample_ball,
                                 slope_witness_pairs, tangency_defect,
                                 tangency_solve, tangent_value_range)


def parabola():
    """f(x) = x^2 on [0,1] via the derivative 2x."""
    return C1Fn(pl_from_points([(0, 0), (1, 2)]))


def tent_fn():
    return C1Fn(pl_from_points([(0, 0), (F(1, 2), 1), (1, 0)]))


class TestAffineAt:
    def test_parabola_at_one(self):
        a = affine_at(parabola(), 1)
        # tangent x -> 1 + 2(x - 1)
        assert a(1) == 1 and a(F(1, 2)) == 0 and a(2) == 3

    def test_affine_function_is_its_own_tangent(self):
        f = C1Fn(pl_constant(F(2, 3)))
        for z in (0, F(1, 3), 1):
            a = affine_at(f, z)
            for x in (0, F(1, 7), 1):
                assert a(x) == f(x)

    def test_slope_matches_derivative(self):
        f = parabola()
        z = f.derivative.breakpoints[0]
        assert affine_at(f, z).slope == f.derivative(z)

    def test_anchor_value(self):
        f = tent_fn()
        for z in (F(1, 5), F(1, 2), F(9, 10)):
            assert affine_at(f, z)(z) == f(z)


class TestEnvelopeMember:
    def test_point_on_own_tangent(self):
        f = parabola()
        z0 = F(1, 3)
        pt = (z0, f(z0))
        assert tangency_defect(pt, f, z0) == 0
        w = envelope_member(pt, f, [(F(1, 4), F(1, 2))], F(0))
        assert w is not None and w.certified

    def test_parabola_below_vertex(self):
        # f = x^2, point (0, -2): anchors solve -2 = -z^2 i.e. z = sqrt(2);
        # scaled into [0,1]: use point (0, -1/2), root z = sqrt(1/2)
        f = parabola()
        w = envelope_member((F(0), F(-1, 2)), f, [(F(1, 2), F(1))], F(1, 10 ** 9))
        assert w is not None
        assert w.defect <= F(1, 10 ** 9)
        # independent check: anchor near sqrt(1/2)
        assert abs(w.anchor ** 2 - F(1, 2)) < F(1, 10 ** 4)

    def test_absent_when_sign_constant(self):
        # far above the parabola: tangents anchored in [0, 1/4] stay below
        f = parabola()
        w = envelope_member((F(1, 8), F(2)), f, [(F(0), F(1, 4))], F(0))
        assert w is None

    def test_exact_iff_on_tangent(self):
        f = parabola()
        z = F(1, 4)
        on = (F(3, 4), affine_at(f, z)(F(3, 4)))
        off = (on[0], on[1] + F(1, 997))
        assert tangency_defect(on, f, z) == 0
        assert tangency_defect(off, f, z) > 0


class TestBallInEnvelope:
    def test_parabola_bracket(self):
        f = parabola()
        center = (F(0), F(-1, 2))
        br = ball_in_envelope(center, F(1, 16), f, [(F(1, 4), F(1))])
        assert br is not None
        assert bracket_covers(br, center, F(1, 16), f)
        assert F(1, 4) < br.s1 < br.s2 < F(1)

    def test_no_bracket_when_range_too_small(self):
        # slope variation over a tiny component cannot sweep a big ball
        f = parabola()
        br = ball_in_envelope((F(1, 2), F(0)), F(1, 4), f,
                              [(F(1, 2), F(33, 64))])
        assert br is None

    def test_degenerate_radius_reduces_to_membership(self):
        f = parabola()
        z0 = F(1, 3)
        pt = (F(2, 3), affine_at(f, z0)(F(2, 3)))
        br = ball_in_envelope(pt, F(0), f, [(F(1, 4), F(1, 2))])
        assert br is not None

    def test_sampled_coverage_inside_bracket(self):
        from tangentcert.tangent import sample_ball_coverage
        f = parabola()
        center = (F(0), F(-1, 2))
        eta = F(1, 16)
        br = ball_in_envelope(center, eta, f, [(F(1, 4), F(1))])
        host = (min(br.s1, br.s2), max(br.s1, br.s2))
        frac = sample_ball_coverage(center, eta, f, [host], 1000, F(0))
        assert frac == 1


class TestTangencySolve:
    def test_convex_raises(self):
        with pytest.raises(MonotoneError):
            tangency_solve(parabola(), 0, 1, F(1, 1000))

    def test_tent_solution(self):
        f = tent_fn()
        tau = F(1, 10 ** 6)
        res = tangency_solve(f, 0, 1, tau)
        e, w = res.pair.e, res.pair.w
        assert 0 < e < w < 1
        assert res.pair.defect <= tau
        # postcondition restated through eval_pair
        fe, ge = f.eval_pair(e)
        fw, _ = f.eval_pair(w)
        assert abs(fw - (fe + ge * (w - e))) <= tau

    def test_grid_oracle_sign_change(self):
        f = tent_fn()
        res = tangency_solve(f, 0, 1, F(1, 10 ** 6))
        grid = [F(k, 1000) for k in range(1001)]
        vals = [homotopy_residual(f, res.pairs, t) for t in grid]
        assert vals[0] < 0 < vals[-1]
        below = max(i for i, v in enumerate(vals) if v < 0 and grid[i] <= res.t_star)
        above = min(i for i, v in enumerate(vals) if v > 0 and grid[i] >= res.t_star)
        assert grid[below] <= res.t_star <= grid[above]


class TestTangentValueRange:
    def test_matches_samples(self):
        f = tent_fn()
        xi = F(9, 10)
        lo, hi = tangent_value_range(f, F(1, 10), F(6, 10), xi)
        rng = random.Random(3)
        for _ in range(200):
            x = F(1, 10) + F(rng.randint(0, Byte := 2 ** 20), Byte) * F(1, 2)
            v = affine_at(f, x)(xi)
            assert lo <= v <= hi


class TestLimitConsistency:
    def test_identical_stages(self):
        f = tent_fn()
        z = F(1, 4)
        pt = (F(3, 4), affine_at(f, z)(F(3, 4)))
        rep = limit_consistency([f, f, f], [z, z, z], pt,
                                [F(0), F(0), F(0)])
        assert rep.defects == (0, 0, 0)
        assert rep.defects_ok and rep.slope_tail_ok

    def test_slope_tail_bound_enforced(self):
        f1 = C1Fn(pl_constant(0))
        f2 = C1Fn(pl_constant(F(3, 4)))  # sup gap 3/4 > 2^-1
        rep = limit_consistency([f1, f2], [F(1, 2), F(1, 2)], (F(1, 2), F(0)),
                                [F(1), F(1)])
        assert not rep.slope_tail_ok


class TestSampleBall:
    def test_points_inside_open_ball(self):
        c = (F(1, 2), F(1, 3))
        r = F(1, 7)
        pts = sample_ball(c, r, 257, seed=1)
        assert len(pts) == 257
        for x, y in pts:
            assert (x - c[0]) ** 2 + (y - c[1]) ** 2 < r * r

    def test_deterministic(self):
        assert sample_ball((F(0), F(0)), F(1), 64, 5) == sample_ball(
            (F(0), F(0)), F(1), 64, 5)
