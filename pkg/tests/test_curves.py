"""Genus / self-intersection criteria."""

from __future__ import annotations

import pytest

from formalnbhd.curves import (
    CurveData,
    corollary_laufer,
    curve_report,
    fired_clauses,
    linearizable_for_all_k,
    proposition_5_1,
    proposition_5_2,
    vanishing_flags,
)
from formalnbhd.errors import InputError, NotApplicableError

from oracles import CLAUSE_TABLE, THRESHOLD_TABLE, TUBE_TABLE


class TestVanishingFlags:
    def test_elliptic_negative(self):
        f = vanishing_flags(CurveData(1, -1), 1)
        assert f.split_guaranteed.guaranteed
        assert f.comfortable_step_guaranteed.guaranteed
        assert "-1 < 0" in f.split_step_vanishes.reason

    def test_conic_inconclusive(self):
        f = vanishing_flags(CurveData(0, 4), 1)
        assert not f.split_guaranteed.guaranteed
        assert not f.comfortable_step_guaranteed.guaranteed
        assert f.split_guaranteed.status == "inconclusive"

    @pytest.mark.parametrize("k", range(1, 9))
    def test_rational_zero_self_intersection(self, k):
        f = vanishing_flags(CurveData(0, 0), k)
        assert f.split_guaranteed.guaranteed
        assert f.comfortable_guaranteed.guaranteed
        assert f.linearizable_guaranteed.guaranteed

    def test_k_must_be_positive(self):
        with pytest.raises(InputError):
            vanishing_flags(CurveData(0, 0), 0)


class TestProposition51:
    def test_clauses_i_ii(self):
        assert fired_clauses(CurveData(2, -5)) == ["i", "ii"]
        assert linearizable_for_all_k(CurveData(2, -5))

    def test_only_v(self):
        assert fired_clauses(CurveData(0, 3)) == ["v"]
        rep = curve_report(CurveData(0, 3))
        assert rep.orders[0].split_guaranteed.guaranteed
        assert not rep.orders[1].split_guaranteed.guaranteed

    def test_iv_v(self):
        assert fired_clauses(CurveData(0, 1)) == ["iv", "v"]
        conclusions = {c.label: c.conclusion for c in proposition_5_1(CurveData(0, 1))}
        assert conclusions["iv"] == "3-split and 1-comfortable"


class TestProposition52:
    def test_genus_two(self):
        t = proposition_5_2(CurveData(2, -3))
        assert (t.k0_split, t.k0_comfort, t.k0_linearizable) == (2, 1, 2)

    def test_genus_one(self):
        t = proposition_5_2(CurveData(1, -1))
        assert (t.k0_split, t.k0_comfort) == (1, 1)

    def test_not_applicable(self):
        with pytest.raises(NotApplicableError):
            proposition_5_2(CurveData(2, 1))
        with pytest.raises(NotApplicableError):
            proposition_5_2(CurveData(0, -1))

    def test_integral_bound_is_strict(self):
        # (4g-4)/|d| = 2 exactly: smallest integer strictly above is 3
        assert proposition_5_2(CurveData(3, -4)).k0_split == 3


class TestCorollary:
    def test_rational(self):
        t = corollary_laufer(CurveData(0, -1))
        assert t.applicable and t.clauses == ("a",)
        assert "not computed" in t.disclaimer

    def test_clause_c(self):
        t = corollary_laufer(CurveData(3, -9))
        assert t.applicable and t.clauses == ("c",)

    def test_positive(self):
        assert not corollary_laufer(CurveData(1, 1)).applicable

    def test_verified_orders(self):
        # g=3, d=-2: needs k0 > 4 for splitting and k1 > 2 for comfortable
        assert not corollary_laufer(CurveData(3, -2)).applicable
        assert corollary_laufer(CurveData(3, -2), split_order=5, comfortable_order=3).clauses == ("b",)
        assert not corollary_laufer(CurveData(3, -2), split_order=4, comfortable_order=3).applicable
        # g=2, d=-3 < 2-2g: clause (d) with a 2-split embedding
        assert corollary_laufer(CurveData(2, -3), split_order=2).clauses == ("d",)


class TestTable:
    @pytest.mark.parametrize("gd", sorted(CLAUSE_TABLE))
    def test_clauses(self, gd):
        assert set(fired_clauses(CurveData(*gd))) == CLAUSE_TABLE[gd]

    @pytest.mark.parametrize("gd", sorted(THRESHOLD_TABLE))
    def test_thresholds(self, gd):
        expected = THRESHOLD_TABLE[gd]
        if expected is None:
            with pytest.raises(NotApplicableError):
                proposition_5_2(CurveData(*gd))
        else:
            t = proposition_5_2(CurveData(*gd))
            assert (t.k0_split, t.k0_comfort) == expected

    @pytest.mark.parametrize("gd", sorted(TUBE_TABLE))
    def test_tube(self, gd):
        assert corollary_laufer(CurveData(*gd)).clauses == TUBE_TABLE[gd]


# -- invariants --------------------------------------------------------------------------------
GRID = [(g, d) for g in range(0, 5) for d in range(-12, 7)]


@pytest.mark.parametrize("g,d", GRID)
def test_clause_consistency(g, d):
    c = CurveData(g, d, 8)
    fired = set(fired_clauses(c))
    if {"i", "ii"} <= fired:
        for k in range(1, 9):
            f = vanishing_flags(c, k)
            assert f.split_guaranteed.guaranteed
            assert f.comfortable_guaranteed.guaranteed
            assert f.linearizable_guaranteed.guaranteed
    if "i" in fired:
        assert all(vanishing_flags(c, k).split_guaranteed.guaranteed for k in range(1, 9))


@pytest.mark.parametrize("g,d", GRID)
def test_monotone_in_d(g, d):
    for k in range(1, 7):
        hi, lo = vanishing_flags(CurveData(g, d), k), vanishing_flags(CurveData(g, d - 1), k)
        for name in (
            "split_step_vanishes",
            "comfortable_step_guaranteed",
            "split_guaranteed",
            "comfortable_guaranteed",
            "linearizable_guaranteed",
        ):
            if getattr(hi, name).guaranteed:
                assert getattr(lo, name).guaranteed


@pytest.mark.parametrize("g,d", [(g, d) for g in range(1, 7) for d in range(-12, 0)])
def test_threshold_order(g, d):
    t = proposition_5_2(CurveData(g, d))
    assert t.k0_comfort <= t.k0_split
    assert t.k0_split * -d > 4 * g - 4 and (t.k0_split - 1) * -d <= 4 * g - 4


@pytest.mark.parametrize("g,d", GRID)
def test_linearizable_needs_split_and_comfort(g, d):
    for k in range(1, 7):
        f = vanishing_flags(CurveData(g, d), k)
        if f.linearizable_guaranteed.guaranteed:
            assert f.split_guaranteed.guaranteed
            assert all(vanishing_flags(CurveData(g, d), j).comfortable_step_guaranteed.guaranteed for j in range(1, k))


class TestReport:
    def test_summary(self):
        assert curve_report(CurveData(2, -5)).summary == ("linearizable guaranteed for all k",)
        assert curve_report(CurveData(0, 4)).summary == ("splitting inconclusive",)
        assert curve_report(CurveData(0, 3)).summary[0].startswith("split guaranteed up to k = 1")

    def test_dict_and_text(self):
        rep = curve_report(CurveData(2, -3, 4))
        d = rep.to_dict()
        assert d["thresholds"]["k0_split"] == 2
        assert len(d["orders"]) == 4
        text = rep.to_text()
        assert "k0_split=2" in text and "tube corollary" in text

    @pytest.mark.parametrize("bad", [dict(g=-1, d=0), dict(g=0, d=0, k_max=0), dict(g=1.5, d=0)])
    def test_invalid(self, bad):
        with pytest.raises(InputError):
            CurveData(**bad)
