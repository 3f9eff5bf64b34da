from itertools import product

import pytest
from hypothesis import given, strategies as st

from dframes.dframe import (
    AXIOMS, SIER, TRIVIAL_D, TWO_D, DFrame, DFrameHom, FinBispace, PairRelation, PairSpace,
    all_bispaces, check_axioms, contot_violation, dframe_iso, enumerate_dframe_homs, identity_hom,
    is_dframe_hom, omega_d, one_point_bispace, pair_op, sierpinski_bispace, topologies,
)
from dframes.errors import StructureError
from dframes.lattice import CHAIN_3, FRAME_2, FrameHom, FinFrame, FinPoset

import oracles
from conftest import frames, omega_dframes

C3 = PairSpace(CHAIN_3, CHAIN_3)
Z, M, O = 0, 1, 2  # CHAIN_3 indices for 0 < m < 1


def test_pair_operation_bounds():
    s = PairSpace(FRAME_2, FRAME_2)
    assert s.wedge(s.tt, s.ff) == s.ff and s.vee(s.tt, s.ff) == s.tt
    assert s.sqcap(s.tt, s.ff) == s.bot and s.sqcup(s.tt, s.ff) == s.top
    assert pair_op(s, "vee", s.tt, s.ff) == s.tt


def test_pair_join_in_chain_square():
    assert C3.vee((M, Z), (Z, M)) == (M, Z)


def test_mismatched_pairs_rejected():
    with pytest.raises(StructureError):
        C3.check((3, 0))
    with pytest.raises(StructureError):
        PairRelation.of(C3, [(0, 5)])


def test_sier_passes_every_axiom():
    report = check_axioms(SIER)
    assert report.is_dframe and [r.axiom for r in report.results] == list(AXIOMS)


def test_adding_top_to_sier_con_breaks_con_tot():
    bad = DFrame(SIER.plus, SIER.minus, SIER.con.with_pairs([(O, O)]), SIER.tot)
    report = check_axioms(bad)
    assert not report["con-tot"].holds
    assert report["con-tot"].witness == ((O, O), (O, Z))


def test_empty_con_misses_tt():
    d = DFrame.build(FRAME_2, FRAME_2, [], TWO_D.tot.members)
    r = check_axioms(d)["con,tot-tt,ff"]
    assert not r.holds and r.witness == ("con", "tt")


def test_each_axiom_can_fail_on_its_own():
    s = PairSpace(FRAME_2, FRAME_2)
    con, tot = set(TWO_D.con.members), set(TWO_D.tot.members)
    # con not down-closed: drop bottom
    r = check_axioms(DFrame(FRAME_2, FRAME_2, PairRelation(s, frozenset(con - {(0, 0)})), TWO_D.tot))
    assert not r["con-down"].holds
    r = check_axioms(DFrame(FRAME_2, FRAME_2, TWO_D.con, PairRelation(s, frozenset(tot - {(1, 1)}))))
    assert not r["tot-up"].holds
    # {tt, ff} is closed under both logical operations but not upward
    r = check_axioms(DFrame(FRAME_2, FRAME_2, TWO_D.con, PairRelation(s, frozenset({(1, 0), (0, 1)}))))
    assert not r["tot-up"].holds and r["tot-wedge,vee"].holds


def test_wedge_vee_failure_detected():
    # bottom and top are logically incomparable; their join is tt
    d = DFrame.build(FRAME_2, FRAME_2, [(0, 0), (1, 1)], TWO_D.tot.members)
    r = check_axioms(d)["con-wedge,vee"]
    assert not r.holds and r.witness == ((0, 0), (1, 1), "vee")


def test_omega_of_one_point_is_two_d():
    d = omega_d(one_point_bispace())
    assert d.con.members == frozenset({(0, 0), (0, 1), (1, 0)})
    assert d.tot.members == frozenset({(1, 1), (1, 0), (0, 1)})
    assert dframe_iso(d, TWO_D) is not None


def test_omega_of_sierpinski_is_sier():
    d = omega_d(sierpinski_bispace())
    assert dframe_iso(d, SIER) is not None
    assert d.con.members == SIER.con.members and d.tot.members == SIER.tot.members


def test_sier_relations_by_description():
    con = {(Z, y) for y in range(3)} | {(x, Z) for x in range(3)} | {(M, M)}
    tot = {(O, y) for y in range(3)} | {(x, O) for x in range(3)} | {(M, M)}
    assert SIER.con.members == con and SIER.tot.members == tot


def test_bispace_rejects_non_topology():
    with pytest.raises(StructureError):
        FinBispace(("x", "y"), frozenset({0, 1, 3}), frozenset({0, 2}))


def test_topology_counts():
    assert [len(topologies(n)) for n in (1, 2, 3)] == [1, 4, 29]


def test_identity_and_collapse_homs():
    assert is_dframe_hom(identity_hom(SIER), SIER, SIER)
    collapse_plus = FrameHom(CHAIN_3, FRAME_2, (0, 1, 1))
    collapse_minus = FrameHom(CHAIN_3, FRAME_2, (0, 0, 1))
    assert is_dframe_hom(DFrameHom(collapse_plus, collapse_minus), SIER, TWO_D)


def test_swapped_collapse_is_not_a_hom():
    h = DFrameHom(FrameHom(CHAIN_3, FRAME_2, (0, 1, 1)), FrameHom(CHAIN_3, FRAME_2, (0, 1, 1)))
    check = is_dframe_hom(h, SIER, TWO_D)
    assert not check.ok
    name, a, image = check.witness
    assert name == "con" and a in SIER.con.members and image not in TWO_D.con.members


def test_bad_component_is_a_structural_error():
    h = DFrameHom(FrameHom(CHAIN_3, FRAME_2, (0, 1, 0)), FrameHom(CHAIN_3, FRAME_2, (0, 1, 1)))
    with pytest.raises(StructureError):
        is_dframe_hom(h, SIER, TWO_D)


def test_trivial_dframe():
    assert TRIVIAL_D.is_trivial() and check_axioms(TRIVIAL_D).is_dframe


@given(omega_dframes())
def test_omega_relations_match_definition(d):
    space = d.space
    assert check_axioms(d).is_dframe
    assert oracles.contot_holds(space, d.con.members, d.tot.members)


def test_omega_of_every_bispace_up_to_three_points():
    for n in (1, 2, 3):
        for X in all_bispaces(n):
            assert check_axioms(omega_d(X)).is_dframe


@given(frames(2), frames(2))
def test_both_orders_are_distributive_lattices(a, b):
    s = PairSpace(a, b)
    ps = s.pairs
    for x, y, z in product(ps, repeat=3):
        assert s.wedge(x, s.vee(y, z)) == s.vee(s.wedge(x, y), s.wedge(x, z))
        assert s.sqcap(x, s.sqcup(y, z)) == s.sqcup(s.sqcap(x, y), s.sqcap(x, z))
    for x, y in product(ps, repeat=2):
        assert s.leq(x, s.vee(x, y)) and s.leq(s.wedge(x, y), x)
        assert s.sqleq(x, s.sqcup(x, y)) and s.sqleq(s.sqcap(x, y), x)


@given(omega_dframes(), omega_dframes(), omega_dframes())
def test_hom_composition(a, b, c):
    for f in enumerate_dframe_homs(a, b)[:4]:
        for g in enumerate_dframe_homs(b, c)[:4]:
            assert is_dframe_hom(f.compose(g), a, c)


@given(omega_dframes())
def test_dirsup_literal_scan_agrees_with_down_closure(d):
    # every down-closed relation holds the sups of its directed subsets
    full = check_axioms(d, directed_cap=len(d.con))
    assert full["con-dirsup"].holds
    assert oracles.directed_sups(d.space, d.con.members) <= set(d.con.members)


@given(omega_dframes())
def test_contot_violation_agrees_with_brute_force(d):
    extra = d.con.with_pairs([d.space.top])
    assert (contot_violation(d.space, extra.members, d.tot.members) is None) == \
        oracles.contot_holds(d.space, extra.members, d.tot.members)
