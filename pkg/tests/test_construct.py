import dataclasses
from fractions import Fraction as F

import pytest

from tangentcert.construct import (descent_premises, first_stage,
                                   inductive_step, run_stages, verify_stage)
from tangentcert.tangent import affine_at


class TestFirstStage:
    def test_slope_bound(self):
        st = first_stage(depth=8)
        assert st.f.derivative.sup_norm() <= F(1, 2)

    def test_single_component_right_endpoint(self):
        st = first_stage(depth=8)
        assert len(st.P.components) == 1
        (l, r), = st.P.components
        assert st.rstar == (r,)
        rec = st.pairs[0]
        assert l == rec.e / 2 and r == rec.w

    def test_tangency_defect_within_budget(self):
        st = first_stage(depth=8)
        rec = st.pairs[0]
        # residual check through eval_pair
        fe, ge = st.f.eval_pair(rec.e)
        fw, _ = st.f.eval_pair(rec.w)
        assert abs(fw - (fe + ge * (rec.w - rec.e))) == rec.defect
        assert rec.defect <= st.tau


class TestInductiveStep:
    def test_exact_derivative_distance(self, stage4):
        for k in (2, 3, 4):
            gap = stage4[k - 1].f.derivative.sub(
                stage4[k - 2].f.derivative).sup_norm()
            assert gap == F(1, 2 ** k)

    def test_perturbation_supports(self, stage4):
        for st in stage4[1:]:
            prev = stage4[st.k - 2]
            supp = F(0)
            for z in st.z1 + st.z2 + st.z3:
                assert prev.P.interior_contains(z - st.delta_star)
                assert prev.P.interior_contains(z + st.delta_star)
                supp += 2 * st.delta_star
            assert supp < st.eta / 2

    def test_component_count_grows(self, stage4):
        for k, st in enumerate(stage4, start=1):
            assert len(st.P.components) >= 2 ** (k - 1)

    def test_determinism(self):
        a = run_stages(2, depth=8)
        b = run_stages(2, depth=8)
        assert a == b


class TestVerifyStage:
    def test_single_stage_passes(self):
        cert = verify_stage([first_stage(depth=8)])
        assert cert.passed

    def test_full_run_passes(self, stage4):
        cert = verify_stage(stage4)
        assert cert.passed, cert.failing()[:4]

    def test_uvdr_instances_all_stages(self, stage4):
        cert = verify_stage(stage4)
        uvdr = [v for v in cert.verdicts if v.condition == "uvdr"]
        # one instance per (windowed d, stage l >= birth + 1)
        expected = sum(len(st.windows) for st in stage4)
        assert len(uvdr) == expected and all(v.ok for v in uvdr)

    def test_tampered_eta_detected(self, stage4):
        bad = [dataclasses.replace(st, eta=F(3, 5)) if st.k == 2 else st
               for st in stage4]
        cert = verify_stage(bad)
        assert not cert.passed
        assert any(v.condition == "eta" and v.stage == 2 and not v.ok
                   for v in cert.verdicts)

    def test_slack_positive_everywhere(self, stage4):
        for st in stage4[1:]:
            prev = stage4[st.k - 2]
            assert st.eta < prev.eta / 2
            assert st.f.diff(prev.f).sup_norm() < st.eta / 2
            assert 6 * st.eta < F(1, 2 ** st.k) * st.delta

    def test_defect_ledger_within_budget(self, stage4):
        for st in stage4:
            ledger = dict(st.ledger)
            assert ledger["tangency"] <= st.tau
            assert st.tau <= st.eta_next / 100


class TestDescentPremises:
    def test_single_stage_trivial(self):
        rep = descent_premises([first_stage(depth=8)])
        assert rep.passed and rep.tails == () and rep.coverage == ()

    def test_tail_bounds(self, stage4):
        rep = descent_premises(stage4)
        assert rep.passed
        for k, sup, bound, ok in rep.tails:
            assert ok and sup < bound
            assert bound == stage4[k - 1].eta_next

    def test_dep_window_decay(self, stage4):
        rep = descent_premises(stage4)
        for d, width, bound, ok in rep.dep:
            assert ok and width < bound


class TestAnchorsChain:
    def test_reanchored_tangency_defects(self, stage4):
        """Each re-anchor root keeps the ball center on a tangent of the
        previous stage function within its recorded defect."""
        for st in stage4[1:]:
            prev = stage4[st.k - 2]
            for d, z, defect in st.anchors2:
                target = st.target_for(d)
                x, y = target.center
                assert abs(affine_at(prev.f, z)(x) - y) == defect
                assert defect <= prev.eta / 100
