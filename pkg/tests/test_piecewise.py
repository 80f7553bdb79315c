from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tangentcert.piecewise import (C1Fn, DomainError, MonotoneError,
                                   PiecewiseLinearFn, SupportWindows,
                                   WindowError, add_integral,
                                   build_base_derivative, build_perturbation,
                                   eval_pair, level_set_last,
                                   nonmonotone_witness, pl_constant,
                                   pl_from_points, spike_points)


def tent():
    return pl_from_points([(0, 0), (F(1, 2), 1), (1, 0)])


def brute_integral(g, x, steps=4096):
    """Independent trapezoid oracle on a fine uniform grid plus x itself."""
    xs = sorted({F(k, steps) for k in range(steps + 1)} | {x})
    xs = [t for t in xs if t <= x]
    total = F(0)
    for a, b in zip(xs, xs[1:]):
        total += (g(a) + g(b)) * (b - a) / 2
    return total


class TestEvalPair:
    def test_constant_one(self):
        f = C1Fn(pl_constant(1))
        assert eval_pair(f, F(1, 2)) == (F(1, 2), 1)

    def test_zero(self):
        f = C1Fn(pl_constant(0))
        for x in (0, F(1, 3), 1):
            assert eval_pair(f, x) == (0, 0)

    def test_tent_integral(self):
        f = C1Fn(tent())
        # oracle: exact piecewise integration of the tent on [0, 1/2]
        assert brute_integral(tent(), F(1, 2)) == F(1, 4)
        assert eval_pair(f, F(1, 2)) == (F(1, 4), 1)

    def test_domain_error(self):
        f = C1Fn(tent())
        with pytest.raises(DomainError):
            f.eval_pair(F(3, 2))

    @given(st.fractions(min_value=0, max_value=1))
    def test_matches_brute_oracle(self, x):
        f = C1Fn(tent())
        assert f(x) == brute_integral(tent(), x)


class TestSupNorm:
    def test_zero(self):
        assert pl_constant(0).sup_norm() == 0

    def test_tent(self):
        assert tent().sup_norm() == 1

    def test_perturbation_amplitude(self):
        w = SupportWindows(((F(1, 2), F(1, 10)),))
        h = build_perturbation(w, F(1, 8))
        assert h.sup_norm() == F(1, 8)


class TestOscillation:
    def test_constant(self):
        assert pl_constant(F(5, 7)).oscillation(0, 1) == 0

    def test_identity(self):
        g = pl_from_points([(0, 0), (1, 1)])
        assert g.oscillation(0, 1) == 1

    def test_tent_inner(self):
        # oracle: scan of node values on [1/4, 3/4]
        g = tent()
        nodes = [F(1, 4), F(1, 2), F(3, 4)]
        vals = [g(t) for t in nodes]
        assert max(vals) - min(vals) == F(1, 2)
        assert g.oscillation(F(1, 4), F(3, 4)) == F(1, 2)

    @given(st.fractions(min_value=0, max_value=1),
           st.fractions(min_value=0, max_value=1),
           st.fractions(min_value=0, max_value=1),
           st.fractions(min_value=0, max_value=1))
    def test_dominates_sampled_variation(self, a, b, x, y):
        g = build_base_derivative(5)
        a, b = min(a, b), max(a, b)
        if a == b:
            return
        x = a + (b - a) * x
        y = a + (b - a) * y
        assert g.oscillation(a, b) >= abs(g(x) - g(y))


class TestSupportMeasure:
    def test_empty(self):
        assert SupportWindows(()).measure() == 0

    def test_single(self):
        assert SupportWindows(((F(1, 2), F(1, 10)),)).measure() == F(1, 5)

    def test_additive(self):
        w = SupportWindows(((F(1, 4), F(1, 16)), (F(3, 4), F(1, 16))))
        assert w.measure() == F(1, 4)

    def test_brute_force_merge(self):
        w = SupportWindows(((F(1, 4), F(1, 16)), (F(3, 4), F(1, 16))))
        ivs = sorted(w.intervals())
        total = F(0)
        cursor = F(0)
        for l, r in ivs:
            l = max(l, cursor)
            if r > l:
                total += r - l
                cursor = r
        assert total == w.measure()

    def test_overlap_rejected(self):
        with pytest.raises(WindowError):
            SupportWindows(((F(1, 2), F(1, 4)), (F(5, 8), F(1, 4))))


class TestNonmonotoneWitness:
    def test_monotone_raises(self):
        g = pl_from_points([(0, 0), (1, 1)])
        with pytest.raises(MonotoneError):
            nonmonotone_witness(g, 0, 1)

    def test_tent_pairs(self):
        g = tent()
        w = nonmonotone_witness(g, 0, 1)
        assert 0 < w.e_star < w.w0 < 1 and g(w.e_star) > g(w.w0)
        assert 0 < w.e1_star < w.w1 < 1 and g(w.e1_star) < g(w.w1)

    def test_sawtooth_dyadic_intervals(self):
        g = build_base_derivative(5)
        w = nonmonotone_witness(g, F(1, 4), F(3, 8))
        assert F(1, 4) < w.e_star < w.w0 < F(3, 8)
        assert g(w.e_star) > g(w.w0)


class TestBaseDerivative:
    def test_depth_one_is_tent(self):
        g = build_base_derivative(1)
        assert g.sup_norm() <= F(1, 2)
        assert len(g.breakpoints) == 3

    @pytest.mark.parametrize("depth", [2, 4, 8])
    def test_norm_bound(self, depth):
        assert build_base_derivative(depth).sup_norm() <= F(1, 2)

    def test_random_dyadic_intervals(self):
        import random
        rng = random.Random(11)
        depth = 9
        g = build_base_derivative(depth)
        for _ in range(100):
            j = rng.randint(0, depth - 2)
            k = rng.randint(0, 2 ** j - 1)
            a, b = F(k, 2 ** j), F(k + 1, 2 ** j)
            w = nonmonotone_witness(g, a, b)  # must not raise
            assert a < w.e_star < w.w0 < b


class TestPerturbation:
    def test_empty_windows(self):
        h = build_perturbation(SupportWindows(()), F(1, 4))
        assert h.sup_norm() == 0

    def test_single_window(self):
        win = (F(1, 2), F(1, 10))
        h = build_perturbation(SupportWindows((win,)), F(1, 4))
        assert h.sup_norm() == F(1, 4)
        s1, s2 = spike_points(win)
        assert s1 < s2 < F(1, 2)
        assert h(s1) == -F(1, 4) and h(s2) == F(1, 4)
        # support inside the window
        assert h(F(2, 5)) == 0 and h(F(3, 5)) == 0
        assert h(F(39, 100)) == 0 and h(F(61, 100)) == 0

    def test_zero_mean_per_window(self):
        wins = ((F(1, 4), F(1, 16)), (F(3, 4), F(1, 16)))
        h = build_perturbation(SupportWindows(wins), F(1, 8))
        f = C1Fn(h)
        for z, d in wins:
            assert f(z + d) - f(z - d) == 0

    def test_disjoint_supports(self):
        wins = ((F(1, 4), F(1, 16)), (F(3, 4), F(1, 16)))
        h = build_perturbation(SupportWindows(wins), F(1, 8))
        # between the windows the perturbation vanishes identically
        assert h(F(1, 2)) == 0
        assert h.oscillation(F(1, 4) + F(1, 16), F(3, 4) - F(1, 16)) == 0


class TestAddIntegral:
    def test_identity(self):
        f = C1Fn(tent())
        g = add_integral(f, pl_constant(0))
        xs = sorted(set(f.derivative.breakpoints) | set(g.derivative.breakpoints))
        assert all(f(x) == g(x) for x in xs)

    def test_derivative_distance_is_amplitude(self):
        f = C1Fn(pl_constant(0))
        h = build_perturbation(SupportWindows(((F(1, 2), F(1, 10)),)), F(1, 16))
        g = add_integral(f, h)
        assert g.derivative.sub(f.derivative).sup_norm() == F(1, 16)

    def test_uniform_distance_below_half_support(self):
        eta = F(1, 10)
        h = build_perturbation(SupportWindows(((F(1, 2), eta / 8),)), F(1, 2))
        f = C1Fn(pl_constant(0))
        g = add_integral(f, h)
        assert g.diff(f).sup_norm() < eta / 2

    @given(st.fractions(min_value=0, max_value=1))
    @settings(max_examples=30)
    def test_pointwise_derivative_sum(self, x):
        f = C1Fn(tent())
        h = build_perturbation(SupportWindows(((F(1, 2), F(1, 8)),)), F(1, 4))
        g = add_integral(f, h)
        assert g.derivative(x) == f.derivative(x) + h(x)


class TestLevelSet:
    def test_last_crossing(self):
        g = tent()
        # level 1/2 on [1/4, 1]: last point with g = 1/2 is 3/4
        assert level_set_last(g, F(1, 4), 1, F(1, 2)) == F(3, 4)


class TestValueRange:
    def test_tent_c1(self):
        f = C1Fn(tent())
        lo, hi = f.value_range(0, 1)
        assert lo == 0 and hi == f(1)

    def test_interior_extreme(self):
        g = pl_from_points([(0, 1), (F(1, 2), -1), (1, 1)])
        f = C1Fn(g)
        lo, hi = f.value_range(0, 1)
        # the maximum sits where the derivative crosses zero
        assert hi == f(F(1, 4))
