import pytest
from hypothesis import given, strategies as st

from dframes.closure import (
    GeneratorSet, PreDFramePresentation, big_join_close, con_min, corollary_check, d_bar, d_one_step,
    down_close, generate_pre_dframe, split_join_membership, tot_min, up_close,
    verify_dfrm_universal, wedge_vee_close, with_tt_ff,
)
from dframes.dframe import SIER, TWO_D, DFrame, PairRelation, PairSpace, check_axioms, dframe_iso
from dframes.errors import CapacityError, PreconditionError, StructureError
from dframes.lattice import CHAIN_3, FRAME_2, chain
from dframes.presentation import FramePresentation, MeetSemilattice, presentation_of_frame, stability_close
from dframes.lattice import FinPoset

import oracles
from conftest import relations

F2 = PairSpace(FRAME_2, FRAME_2)
C3 = PairSpace(CHAIN_3, CHAIN_3)
Z, M, O = 0, 1, 2


def rel(space, pairs):
    return PairRelation(space, frozenset(pairs))


def test_down_and_up_examples():
    assert down_close(rel(F2, [F2.tt])).members == {(0, 0), (1, 0)}
    assert up_close(rel(F2, [F2.ff])).members == {(0, 1), (1, 1)}
    assert down_close(SIER.con).members == SIER.con.members


def test_wedge_vee_examples():
    assert wedge_vee_close(rel(F2, [F2.tt, F2.ff])).members == {F2.tt, F2.ff}
    R = rel(C3, [(M, Z), (Z, M)])
    assert wedge_vee_close(R, "∨").members == R.members
    R = rel(C3, [(M, M), (O, Z)])
    assert wedge_vee_close(R, "∧").members == R.members
    with pytest.raises(ValueError):
        wedge_vee_close(R, "sideways")


def test_big_join_examples():
    assert big_join_close(rel(F2, [F2.tt])).members == {F2.tt}
    R = rel(C3, [(M, M), (Z, O)])
    assert big_join_close(R, "join").members == R.members


def test_one_step_examples():
    R = down_close(wedge_vee_close(with_tt_ff(rel(C3, [(M, M)]))))
    assert d_one_step(R).members == R.members
    assert d_one_step(R, literal=True, max_size=3).members <= R.members
    R = rel(C3, [(M, Z), (Z, M)])
    assert d_one_step(R, literal=True).members == R.members
    assert d_one_step(rel(C3, [])).members == frozenset()
    assert d_one_step(rel(C3, []), literal=True).members == frozenset()


def test_literal_one_step_capacity():
    wide = PairSpace(CHAIN_3, chain(6))
    with pytest.raises(CapacityError):
        d_one_step(rel(wide, wide.pairs), literal=True)


def test_d_bar_examples():
    full = GeneratorSet.full(C3)
    assert d_bar(SIER.con, full).members == SIER.con.members
    assert (0, 0) in d_bar(rel(C3, []), full).members
    # m together with the top generates the chain; only (m, m) is related,
    # and a generator paired with the empty set is vacuously independent
    gens = GeneratorSet.of([M, O], [M, O])
    assert d_bar(rel(C3, [(M, M)]), gens).members == {(Z, Z), (M, Z), (Z, M), (M, M), (O, Z), (Z, O)}


def test_d_bar_rejects_non_generating_sets():
    with pytest.raises(PreconditionError):
        d_bar(rel(C3, [(M, M)]), GeneratorSet.of([M], [M]))


def test_minimal_relations_are_the_axes():
    assert con_min(rel(C3, [])).members == {(x, Z) for x in range(3)} | {(Z, y) for y in range(3)}
    assert tot_min(rel(C3, [])).members == {(O, y) for y in range(3)} | {(x, O) for x in range(3)}
    assert con_min(SIER.con).members == SIER.con.members
    assert tot_min(SIER.tot).members == SIER.tot.members


def one_point_presentation():
    base = MeetSemilattice.from_poset(FinPoset.from_relation(["1"], []))
    return stability_close(FramePresentation(base, ()))


def sier_self_presentation():
    p = presentation_of_frame(CHAIN_3)
    return PreDFramePresentation(p, p, SIER.con.members, SIER.tot.members)


def test_generation_from_a_single_generator():
    p1 = one_point_presentation()
    gen = generate_pre_dframe(PreDFramePresentation(p1, p1))
    assert dframe_iso(gen.dframe, TWO_D) is not None
    assert check_axioms(gen.dframe).is_dframe


def test_generation_reproduces_sier():
    gen = generate_pre_dframe(sier_self_presentation())
    assert dframe_iso(gen.dframe, SIER) is not None


def test_top_in_con_breaks_con_tot_against_tt():
    # tot always holds tt, so (1,1) in con violates (con-tot) on the plus side
    p1 = one_point_presentation()
    gen = generate_pre_dframe(PreDFramePresentation(p1, p1, frozenset({(0, 0)})))
    report = check_axioms(gen.dframe)
    assert report.is_pre_dframe and not report.is_dframe
    assert report["con-tot"].witness == ((1, 1), (1, 0))


def test_presentation_relations_must_fit_the_bases():
    p1 = one_point_presentation()
    with pytest.raises(StructureError):
        PreDFramePresentation(p1, p1, frozenset({(0, 1)}))


def test_universal_extension_of_sem_is_identity():
    gen = generate_pre_dframe(sier_self_presentation())
    h = verify_dfrm_universal(gen, gen.dframe, gen.sem_plus, gen.sem_minus)
    assert h.plus.map == tuple(range(3)) and h.minus.map == tuple(range(3))


def test_universal_extension_into_two_d():
    p1 = one_point_presentation()
    gen = generate_pre_dframe(PreDFramePresentation(p1, p1, frozenset(), frozenset({(0, 0)})))
    h = verify_dfrm_universal(gen, TWO_D, [1], [1])
    assert h.plus.map == (0, 1)
    gen = generate_pre_dframe(PreDFramePresentation(p1, p1, frozenset({(0, 0)})))
    with pytest.raises(PreconditionError):
        verify_dfrm_universal(gen, TWO_D, [1], [1])


def test_universal_extension_rejects_cover_violations():
    gen = generate_pre_dframe(sier_self_presentation())
    # preserves meets and the top, but the nullary cover demands f(0) = 0
    f = (M, M, O)
    with pytest.raises(PreconditionError) as err:
        verify_dfrm_universal(gen, SIER, f, gen.sem_minus)
    assert err.value.witness[0] == "cover"


def test_split_join_membership():
    assert split_join_membership(SIER, [M], [M])
    assert not split_join_membership(SIER, [O], [M])
    assert split_join_membership(SIER, [], [])


@given(relations())
def test_operators_match_brute_force(R):
    s = R.space
    assert down_close(R).members == oracles.down(s, R.members)
    assert up_close(R).members == oracles.up(s, R.members)
    assert wedge_vee_close(R).members == oracles.op_close(s, R.members, [oracles.vee, oracles.wedge])
    assert wedge_vee_close(R, "wedge").members == oracles.op_close(s, R.members, [oracles.wedge])
    assert big_join_close(R, "join").members == oracles.family_combine(s, R.members, oracles.vee)
    assert big_join_close(R, "meet").members == oracles.family_combine(s, R.members, oracles.wedge)
    full = GeneratorSet.full(s)
    assert d_bar(R, full).members == oracles.d_bar(s, R.members, range(s.plus.size), range(s.minus.size))
    ji = GeneratorSet(s.plus.join_irreducibles, s.minus.join_irreducibles)
    assert d_bar(R, ji).members == oracles.d_bar(
        s, R.members, [i for i in range(s.plus.size) if ji.plus >> i & 1],
        [i for i in range(s.minus.size) if ji.minus >> i & 1])
    if len(R) <= 6:
        assert d_one_step(R, literal=True).members == oracles.directed_sups(s, R.members)


@given(relations())
def test_closure_properties_preserve_wedge_vee(R):
    s = R.space
    closed = wedge_vee_close(R)
    for derived in (down_close(closed), up_close(closed), d_one_step(closed)):
        assert wedge_vee_close(derived).members == derived.members


@given(relations())
def test_distributive_identity_for_family_joins(R):
    seeded = with_tt_ff(R)
    assert big_join_close(wedge_vee_close(seeded), "join").members == \
        big_join_close(wedge_vee_close(seeded, "wedge"), "join").members
    assert big_join_close(wedge_vee_close(seeded), "meet").members == \
        big_join_close(wedge_vee_close(seeded, "vee"), "meet").members


@given(relations())
def test_minimal_relations_match_fixpoint_oracle(R):
    s = R.space
    cur = set(R.members) | {s.tt, s.ff}
    while True:
        nxt = oracles.op_close(s, oracles.down(s, cur), [oracles.vee, oracles.wedge])
        if nxt == cur:
            break
        cur = nxt
    assert con_min(R).members == cur
    cur = set(R.members) | {s.tt, s.ff}
    while True:
        nxt = oracles.op_close(s, oracles.up(s, cur), [oracles.vee, oracles.wedge])
        if nxt == cur:
            break
        cur = nxt
    assert tot_min(R).members == cur
    assert check_axioms(DFrame(s.plus, s.minus, con_min(R), tot_min(R))).is_pre_dframe


@given(relations())
def test_corollary_formulas(R):
    report = corollary_check(R, R)
    assert report.ok and report.stabilization <= 1
    seeded = with_tt_ff(R)
    CON = con_min(R)
    assert big_join_close(wedge_vee_close(seeded, "wedge"), "join").members <= CON.members
    assert big_join_close(wedge_vee_close(seeded, "vee"), "meet").members <= CON.members


@given(relations())
def test_d_equals_d_bar_and_idempotence(R):
    s = R.space
    closed = down_close(wedge_vee_close(with_tt_ff(R)))
    for gens in (GeneratorSet.full(s), GeneratorSet(s.plus.join_irreducibles, s.minus.join_irreducibles)):
        assert d_bar(closed, gens).members == d_one_step(closed).members
    once = d_one_step(closed)
    assert d_one_step(once).members == once.members
