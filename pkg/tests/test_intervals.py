from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tangentcert.intervals import (EmptyUnionError, IntervalUnion, nest_check,
                                   new_right_endpoints)


def U(*pairs):
    return IntervalUnion(tuple((F(a), F(b)) for a, b in pairs))


class TestDecompose:
    def test_two_components(self):
        P = U((F(1, 10), F(2, 10)), (F(3, 10), F(4, 10)))
        comps, rights, mesh = P.decompose()
        assert len(comps) == 2
        assert rights == {F(2, 10), F(4, 10)}
        assert mesh == F(1, 10)

    def test_single(self):
        P = U((F(1, 4), F(3, 4)))
        comps, rights, mesh = P.decompose()
        assert rights == {F(3, 4)} and mesh == F(1, 2)

    def test_empty_rejected(self):
        with pytest.raises(EmptyUnionError):
            IntervalUnion(())

    def test_touching_rejected(self):
        with pytest.raises(ValueError):
            U((F(1, 4), F(1, 2)), (F(1, 2), F(3, 4)))

    def test_reassemble_identity(self):
        P = U((F(1, 10), F(2, 10)), (F(3, 10), F(4, 10)))
        assert IntervalUnion(P.components) == P


class TestNestCheck:
    def test_self(self):
        P = U((F(1, 4), F(3, 4)))
        rep = nest_check(P, P)
        assert rep.subset and rep.right_monotone and not rep.refinement

    def test_refinement(self):
        old = U((F(1, 4), F(3, 4)))
        new = U((F(1, 4), F(3, 8)), (F(5, 8), F(3, 4)))
        rep = nest_check(new, old)
        assert rep.subset and rep.right_monotone and rep.refinement

    def test_straddling_component(self):
        old = U((F(1, 8), F(2, 8)), (F(3, 8), F(4, 8)))
        new = U((F(3, 16), F(7, 16)))
        assert not nest_check(new, old).subset


class TestNewRightEndpoints:
    def test_first_stage(self):
        P1 = U((F(1, 8), F(1, 2)))
        assert new_right_endpoints(P1) == (F(1, 2),)

    def test_difference(self):
        P1 = U((F(1, 4), F(1, 2)))
        P2 = U((F(1, 4), F(5, 16)), (F(3, 8), F(1, 2)))
        assert new_right_endpoints(P2, P1) == (F(5, 16),)

    def test_no_change(self):
        P = U((F(1, 4), F(1, 2)))
        assert new_right_endpoints(P, P) == ()


class TestInterior:
    def test_inside(self):
        assert U((F(1, 4), F(3, 4))).interior_contains(F(1, 2))

    def test_right_endpoint_excluded(self):
        assert not U((F(1, 4), F(3, 4))).interior_contains(F(3, 4))

    def test_gap(self):
        P = U((F(1, 8), F(2, 8)), (F(3, 8), F(4, 8)))
        assert not P.interior_contains(F(5, 16))


class TestClip:
    def test_open_clip(self):
        P = U((F(1, 8), F(2, 8)), (F(3, 8), F(4, 8)))
        pieces = P.clip_to_open(F(3, 16), F(7, 16))
        assert pieces == [(F(3, 16), F(2, 8)), (F(3, 8), F(7, 16))]


@given(st.lists(st.tuples(st.integers(1, 62), st.integers(1, 62)),
                min_size=1, max_size=6))
def test_union_roundtrip_random(pairs):
    ivs = []
    cursor = F(1, 64)
    for a, b in sorted(pairs):
        lo = cursor
        hi = lo + F(max(a, 1), 640)
        if hi >= F(63, 64):
            break
        ivs.append((lo, hi))
        cursor = hi + F(1, 640)
    if not ivs:
        return
    P = IntervalUnion(tuple(ivs))
    comps, rights, mesh = P.decompose()
    assert IntervalUnion(comps) == P
    assert set(rights) == {r for _, r in ivs}
    assert mesh == max(r - l for l, r in ivs)
    rep = nest_check(P, P)
    assert rep.subset and rep.right_monotone
