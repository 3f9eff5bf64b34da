from itertools import product

import pytest
from hypothesis import given

from dframes.errors import CapacityError, PreconditionError, StructureError
from dframes.dframe import frame_isos
from dframes.lattice import CHAIN_3, DIAMOND, FRAME_2, bits, mask_of, validate_frame
from dframes.presentation import (
    Cover, FramePresentation, MeetSemilattice, c_ideal_generate, enumerate_c_ideals,
    extend_universal, factoring_homs, free_meet_semilattice, is_stable, presentation_map_violation,
    presentation_of_frame, sem_map, stability_close,
)

import oracles
from conftest import frames

B = free_meet_semilattice(["g", "h"])
G, H, GH, ONE = (B.index(x) for x in ("g", "h", "g&h", "1"))
PRES = stability_close(FramePresentation(B, (Cover(ONE, frozenset({G, H})),)))
FREE = stability_close(FramePresentation(B, ()))


def names(mask):
    return {B.labels[i] for i in bits(mask)}


def test_free_semilattice_shape():
    assert B.size == 4 and B.top == ONE
    assert B.meet[G][H] == GH


def test_stability_closure_adds_restricted_covers():
    got = {(c.covered, c.coverers) for c in PRES.covers}
    expected = {(b, frozenset(B.meet[u][b] for u in (G, H))) for b in range(B.size)}
    assert got == expected
    assert (G, frozenset({G, GH})) in got
    assert is_stable(PRES)


def test_stability_closure_of_nothing_and_of_reflexive_covers():
    assert FREE.covers == () and is_stable(FREE)
    refl = stability_close(FramePresentation(B, (Cover(G, frozenset({G})),)))
    assert all(c.coverers == frozenset({c.covered}) for c in refl.covers)


def test_malformed_cover_rejected():
    with pytest.raises(StructureError):
        FramePresentation(B, (Cover(G, frozenset({H})),))


def test_unstable_presentation_rejected():
    with pytest.raises(PreconditionError):
        enumerate_c_ideals(FramePresentation(B, (Cover(ONE, frozenset({G, H})),)))


def test_c_ideal_generation_examples():
    diamond = stability_close(FramePresentation(MeetSemilattice.from_frame(DIAMOND), ()))
    a = DIAMOND.index("a")
    assert c_ideal_generate(diamond, [a]) == DIAMOND.below_mask(a)
    assert names(c_ideal_generate(PRES, [G, H])) == {"g", "h", "g&h", "1"}
    assert c_ideal_generate(PRES, []) == 0


def test_c_ideal_counts():
    assert enumerate_c_ideals(FREE).frame.size == 6
    cidl = enumerate_c_ideals(PRES)
    assert [names(m) for m in cidl.ideals] == [set(), {"g&h"}, {"g&h", "g"}, {"g&h", "h"}, set(B.labels)]
    single = MeetSemilattice.from_poset(FRAME_2.poset.__class__.from_relation(["1"], []))
    assert enumerate_c_ideals(stability_close(FramePresentation(single, ()))).frame.size == 2


def test_capacity_guard():
    with pytest.raises(CapacityError):
        enumerate_c_ideals(PRES, capacity=3)


def test_sem_map():
    cidl = enumerate_c_ideals(FREE)
    sem = sem_map(FREE, cidl)
    assert all(cidl.ideal(sem[b]) == B.poset.below[b] for b in range(B.size))
    cidl = enumerate_c_ideals(PRES)
    sem = sem_map(PRES, cidl)
    assert cidl.frame.join[sem[G]][sem[H]] == sem[ONE] == cidl.frame.top


def test_extension_examples():
    cidl = enumerate_c_ideals(PRES)
    sem = sem_map(PRES, cidl)
    fbar = extend_universal(PRES, sem, cidl.frame, cidl, check_unique=True)
    assert fbar.map == tuple(range(cidl.frame.size))
    lab = DIAMOND.index
    f = [0] * B.size
    f[G], f[H], f[GH], f[ONE] = lab("a"), lab("b"), lab("0"), lab("1")
    fbar = extend_universal(PRES, f, DIAMOND, cidl, check_unique=True)
    assert [DIAMOND.labels[y] for y in fbar.map] == ["0", "0", "a", "b", "1"]


def test_non_meet_preserving_map_is_rejected():
    f = [DIAMOND.top] * B.size
    f[G], f[H] = DIAMOND.index("a"), DIAMOND.index("b")
    law, (x, y) = presentation_map_violation(PRES, DIAMOND, f)
    assert law == "meet" and f[B.meet[x][y]] != DIAMOND.meet[f[x]][f[y]]
    with pytest.raises(PreconditionError):
        extend_universal(PRES, f, DIAMOND)


def test_constant_top_map_preserves_meets_and_covers():
    # top & top = top, and each cover's join is top, so the map qualifies;
    # its extension sends only the empty ideal to bottom
    f = [DIAMOND.top] * B.size
    assert presentation_map_violation(PRES, DIAMOND, f) is None
    fbar = extend_universal(PRES, f, DIAMOND, check_unique=True)
    assert fbar.map == (DIAMOND.bottom,) + (DIAMOND.top,) * 4


def test_cover_violation_is_reported():
    f = [DIAMOND.bottom] * B.size
    f[G], f[ONE] = DIAMOND.index("a"), DIAMOND.top
    law, cover = presentation_map_violation(PRES, DIAMOND, f)
    assert law == "cover" and cover.covered == ONE


@pytest.mark.parametrize("frame", [FRAME_2, CHAIN_3, DIAMOND])
def test_self_presentation_reproduces_the_frame(frame):
    pres = presentation_of_frame(frame)
    cidl = enumerate_c_ideals(pres)
    assert sorted(cidl.ideals) == sorted(frame.below_mask(i) for i in range(frame.size))
    assert frame_isos(cidl.frame, frame)


def _random_presentation(frame, picks):
    base = MeetSemilattice.from_frame(frame)
    covers = []
    for a, sub in picks:
        a %= base.size
        below = [u for u in bits(base.poset.below[a])]
        U = frozenset(u for k, u in enumerate(below) if sub >> k & 1)
        covers.append(Cover(a, U))
    return stability_close(FramePresentation(base, tuple(covers)))


@given(frames(2))
def test_ideals_match_brute_force_and_form_a_frame(frame):
    for picks in ([], [(frame.top, 0)], [(frame.top, 3), (1, 1)]):
        pres = _random_presentation(frame, picks)
        cidl = enumerate_c_ideals(pres)
        brute = oracles.c_ideals(pres)
        assert {frozenset(bits(m)) for m in cidl.ideals} == set(brute)
        assert validate_frame(cidl.frame).ok
        for a in range(cidl.frame.size):
            for b in range(cidl.frame.size):
                assert cidl.ideal(cidl.frame.meet[a][b]) == cidl.ideal(a) & cidl.ideal(b)
        # generated ideal is the intersection of all ideals containing the seed
        for M in range(1 << pres.base.size):
            over = [set(I) for I in brute if set(bits(M)) <= I]
            assert set(bits(c_ideal_generate(pres, M))) == set.intersection(*over)
        sem = sem_map(pres, cidl)
        for c in pres.covers:
            assert cidl.frame.join_all(sem[u] for u in c.coverers) == sem[c.covered]


@given(frames(2))
def test_extension_factors_uniquely(target):
    cidl = enumerate_c_ideals(PRES)
    sem = sem_map(PRES, cidl)
    for f in product(range(target.size), repeat=B.size):
        if presentation_map_violation(PRES, target, f) is not None:
            continue
        fbar = extend_universal(PRES, f, target, cidl)
        assert all(fbar.map[sem[b]] == f[b] for b in range(B.size))
        brute = [h for h in oracles.frame_homs(cidl.frame, target)
                 if all(h[sem[b]] == f[b] for b in range(B.size))]
        assert brute == [fbar.map]
        assert [h.map for h in factoring_homs(PRES, f, target, cidl)] == [fbar.map]


def test_mask_helpers_round_trip():
    assert mask_of(bits(0b1011)) == 0b1011
