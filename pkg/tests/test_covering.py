import random
from fractions import Fraction as F

import pytest

from helpers import VIOLATIONS, make_passing_instance
from tangentcert.covering import (CoverInstance, check_cover, covers_point,
                                  margin_terms, sample_cover)
from tangentcert.piecewise import C1Fn, pl_from_points


class TestCheckCover:
    def test_unperturbed_fails_spikes(self):
        rng = random.Random(0)
        inst = make_passing_instance(rng)
        same = CoverInstance(inst.base, inst.base, inst.u, inst.z, inst.v,
                             inst.x, inst.y, inst.eps, inst.delta, inst.eta,
                             inst.s1, inst.s2, inst.tau)
        rep = check_cover(same)
        assert not rep.spike_ok and not rep.passed

    def test_bad_numbers_flagged(self):
        rng = random.Random(1)
        inst = VIOLATIONS["numbers"](make_passing_instance(rng))
        rep = check_cover(inst)
        assert not rep.numbers_ok and not rep.passed

    def test_synthetic_instance_passes_and_samples(self):
        rng = random.Random(2)
        inst = make_passing_instance(rng)
        rep = check_cover(inst)
        assert rep.passed, rep.failing()
        assert sample_cover(inst, 1000) == 1

    def test_each_violation_flags_exactly_one(self):
        rng = random.Random(3)
        for name, breaker in VIOLATIONS.items():
            inst = breaker(make_passing_instance(rng))
            rep = check_cover(inst)
            assert rep.failing() == (name,), (name, rep.failing())

    def test_margin_chain_terms(self):
        """The telescoping decomposition reproduces y - h(s1) exactly and
        each term obeys its stated bound on exact instances."""
        rng = random.Random(4)
        inst = make_passing_instance(rng)
        from tangentcert.tangent import affine_at
        for x_bar in (inst.x - inst.eta, inst.x + inst.eta):
            terms = margin_terms(inst, inst.s1, x_bar)
            total = sum(terms, F(0))
            h1 = affine_at(inst.perturbed, inst.s1)(x_bar)
            assert total == inst.y - h1
            t0, t1, t2, t3, t4, t5, t6 = terms
            assert t0 == 0  # exact tangency
            assert t1 >= -inst.eta
            assert t2 >= -inst.eta
            assert t3 >= inst.eps * inst.delta
            assert t4 >= -inst.eta
            assert t5 >= -inst.eta
            assert t6 >= -inst.eta
            assert total >= inst.eta

    def test_monotone_in_tau(self):
        rng = random.Random(5)
        base = make_passing_instance(rng)
        loose = CoverInstance(base.base, base.perturbed, base.u, base.z,
                              base.v, base.x, base.y, base.eps, base.delta,
                              base.eta, base.s1, base.s2, F(1, 1000))
        rep_tight = check_cover(base)
        rep_loose = check_cover(loose)
        assert rep_tight.passed and rep_loose.passed
        # the defects recorded at tau = 0 also satisfy the looser budget
        assert rep_tight.tangent_defect <= loose.tau


class TestSampleCover:
    def test_badly_failing_numbers_misses_points(self):
        rng = random.Random(6)
        good = make_passing_instance(rng)
        # blow the ball radius far past the maximal tangent sweep: the size
        # condition 6 eta < eps delta fails badly and points escape
        eta_big = 4 * good.eps * good.x + 1
        inst = CoverInstance(good.base, good.perturbed, good.u, good.z,
                             good.v, good.x, good.y, good.eps, good.delta,
                             eta_big, good.s1, good.s2, good.tau)
        assert not check_cover(inst).numbers_ok
        frac = sample_cover(inst, 200)
        assert frac < 1

    def test_shrunken_ball_still_covered(self):
        rng = random.Random(7)
        inst = make_passing_instance(rng)
        small = CoverInstance(inst.base, inst.perturbed, inst.u, inst.z,
                              inst.v, inst.x, inst.y, inst.eps, inst.delta,
                              inst.eta / 10, inst.s1, inst.s2, inst.tau)
        assert sample_cover(small, 200) == 1

    def test_n_validard(self):
        rng = random.Random(8)
        inst = make_passing_instance(rng)
        with pytest.raises(ValueError):
            sample_cover(inst, 0)
