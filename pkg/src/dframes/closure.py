"""Closure operators on pair relations and generation of pre-d-frames.

Every operator returns a fresh :class:`PairRelation`; intermediate stages
are kept so they can be cross-checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable

from .dframe import (
    DFrame, DFrameHom, PairRelation, PairSpace, directed_sup, is_directed, is_dframe_hom,
)
from .errors import CapacityError, PreconditionError, StructureError, limits
from .lattice import FinFrame, bits, mask_of
from .presentation import (
    CIdl, FramePresentation, enumerate_c_ideals, extend_universal, factoring_homs,
    presentation_map_violation, sem_map,
)

WEDGE, VEE, WEDGE_VEE = "wedge", "vee", "wedge_vee"
_MODE_ALIASES = {"∧": WEDGE, "∨": VEE, "∧∨": WEDGE_VEE, WEDGE: WEDGE, VEE: VEE, WEDGE_VEE: WEDGE_VEE}


def down_close(R: PairRelation) -> PairRelation:
    space = R.space
    out = set()
    for a in R.members:
        out.update(space.below(a))
    return PairRelation(space, frozenset(out))


def up_close(R: PairRelation) -> PairRelation:
    space = R.space
    out = set()
    for a in R.members:
        out.update(space.above(a))
    return PairRelation(space, frozenset(out))


def with_tt_ff(R: PairRelation) -> PairRelation:
    return PairRelation(R.space, R.members | {R.space.tt, R.space.ff})


def wedge_vee_close(R: PairRelation, mode: str = WEDGE_VEE) -> PairRelation:
    """Least superset of ``R`` closed under logical ``wedge``, ``vee`` or both."""
    try:
        mode = _MODE_ALIASES[mode]
    except KeyError:
        raise ValueError(f"unknown closure mode {mode!r}") from None
    space = R.space
    ops = {WEDGE: (space.wedge,), VEE: (space.vee,), WEDGE_VEE: (space.wedge, space.vee)}[mode]
    done = set(R.members)
    work = list(done)
    while work:
        a = work.pop()
        for b in list(done):
            for op in ops:
                c = op(a, b)
                if c not in done:
                    done.add(c)
                    work.append(c)
    return PairRelation(space, frozenset(done))


def big_join_close(R: PairRelation, mode: str = "join") -> PairRelation:
    """Logical joins (``mode="join"``) or meets (``"meet"``) of all nonempty subfamilies of ``R``.

    Folding one member at a time keeps this polynomial: after step ``k`` the
    set holds exactly the combinations of the nonempty subsets of the first
    ``k`` members.
    """
    if mode not in ("join", "meet"):
        raise ValueError(f"unknown family mode {mode!r}")
    space = R.space
    op = space.vee if mode == "join" else space.wedge
    acc: set = set()
    for a in sorted(R.members):
        acc |= {op(s, a) for s in acc}
        acc.add(a)
    return PairRelation(space, frozenset(acc))


def d_one_step(R: PairRelation, literal: bool = False, max_size: int | None = None) -> PairRelation:
    """Suprema of the nonempty directed subsets of ``R``.

    A finite directed set contains its maximum, so the fast path returns
    ``R`` itself. ``literal=True`` enumerates subsets (all of them, or those
    of size at most ``max_size``) as a cross-check.
    """
    if not literal:
        return PairRelation(R.space, R.members)
    members = sorted(R.members)
    if max_size is None:
        cap = limits().generators
        if len(members) > cap:
            raise CapacityError(f"literal directed enumeration over {len(members)} pairs exceeds {cap}")
        max_size = len(members)
    out = set()
    space = R.space
    for k in range(1, max_size + 1):
        for sub in combinations(members, k):
            if is_directed(space, sub):
                out.add(directed_sup(space, sub))
    return PairRelation(space, frozenset(out))


@dataclass(frozen=True)
class GeneratorSet:
    """Generator bitsets on each side; every element must be the join of the generators below it."""

    plus: int
    minus: int

    @classmethod
    def full(cls, space: PairSpace) -> "GeneratorSet":
        return cls(space.plus.full, space.minus.full)

    @classmethod
    def of(cls, plus: Iterable[int], minus: Iterable[int]) -> "GeneratorSet":
        return cls(mask_of(plus), mask_of(minus))

    def below(self, frame: FinFrame, side: str, x: int) -> int:
        gens = self.plus if side == "+" else self.minus
        return frame.below_mask(x) & gens

    def generates(self, space: PairSpace) -> bool:
        return all(frame.join_mask(frame.below_mask(x) & gens) == x
                   for frame, gens in ((space.plus, self.plus), (space.minus, self.minus))
                   for x in range(frame.size))


def _join_set(frame: FinFrame, mask: int) -> frozenset:
    """Joins of all subsets (including the empty one) of ``mask``."""
    acc = {frame.bottom}
    for g in bits(mask):
        acc |= {frame.join[s][g] for s in acc}
    return frozenset(acc)


def d_bar(R: PairRelation, gens: GeneratorSet) -> PairRelation:
    """Pairs ``(V A+, V A-)`` over generator subsets with ``A+ x A-`` inside ``R``.

    Empty subsets are allowed, so ``(0, 0)`` is always present.
    """
    space = R.space
    if not gens.generates(space):
        raise PreconditionError("generator sets do not generate the carriers", witness=gens)
    plus_gens = list(bits(gens.plus))
    cap = limits().generators
    if len(plus_gens) > cap:
        raise CapacityError(f"{len(plus_gens)} plus generators exceed the subset-scan capacity {cap}")
    partners = {a: mask_of(b for b in bits(gens.minus) if (a, b) in R.members) for a in plus_gens}
    minus_joins: dict = {}
    out = set()
    # walk subsets A+ of the plus generators, tracking V A+ and the allowed minus generators
    stack = [(0, space.plus.bottom, gens.minus)]
    while stack:
        k, top, allowed = stack.pop()
        if allowed not in minus_joins:
            minus_joins[allowed] = _join_set(space.minus, allowed)
        out.update((top, y) for y in minus_joins[allowed])
        for i in range(k, len(plus_gens)):
            a = plus_gens[i]
            stack.append((i + 1, space.plus.join[top][a], allowed & partners[a]))
    return PairRelation(space, frozenset(out))


def _close(R: PairRelation, direction: str) -> PairRelation:
    cur = with_tt_ff(R)
    while True:
        nxt = down_close(cur) if direction == "down" else up_close(cur)
        nxt = wedge_vee_close(nxt)
        if direction == "down":
            nxt = d_one_step(nxt)
        if nxt.members == cur.members:
            return cur
        cur = nxt


def con_min(R: PairRelation) -> PairRelation:
    """Least consistency relation over ``R``: ``tt``, ``ff`` adjoined, then closed under ``↓``, ∧, ∨ and directed sups."""
    return _close(R, "down")


def tot_min(R: PairRelation) -> PairRelation:
    """Least totality relation over ``R``: ``tt``, ``ff`` adjoined, then closed under ``↑``, ∧ and ∨."""
    return _close(R, "up")


@dataclass(frozen=True)
class CorollaryReport:
    con_ok: bool
    tot_ok: bool
    stabilization: int  # number of D applications that still changed the relation

    @property
    def ok(self) -> bool:
        return self.con_ok and self.tot_ok and self.stabilization <= 1


def corollary_check(con_seed: PairRelation, tot_seed: PairRelation, literal: bool = False) -> CorollaryReport:
    """Compare the fixpoints with ``U_i D^i(↓con_∧∨ ∪ ↓{tt,ff})`` and ``↑tot_∧∨ ∪ ↑{tt,ff}``."""
    space = con_seed.space
    axes = PairRelation(space, frozenset({space.tt, space.ff}))
    cur = down_close(wedge_vee_close(con_seed)) | down_close(axes)
    steps = 0
    while True:
        nxt = d_one_step(cur, literal=literal) | cur
        if nxt.members == cur.members:
            break
        cur = nxt
        steps += 1
    tot = up_close(wedge_vee_close(tot_seed)) | up_close(axes)
    return CorollaryReport(cur.members == con_min(con_seed).members,
                           tot.members == tot_min(tot_seed).members, steps)


# --- pre-d-frame presentations ----------------------------------------------

@dataclass(frozen=True)
class PreDFramePresentation:
    pres_plus: FramePresentation
    pres_minus: FramePresentation
    con1: frozenset = frozenset()
    tot1: frozenset = frozenset()

    def __post_init__(self):
        np, nm = self.pres_plus.base.size, self.pres_minus.base.size
        for name in ("con1", "tot1"):
            rel = frozenset(tuple(p) for p in getattr(self, name))
            object.__setattr__(self, name, rel)
            for a, b in rel:
                if not (0 <= a < np and 0 <= b < nm):
                    raise StructureError(f"{name} pair ({a}, {b}) outside B+ x B-", witness=(a, b))


@dataclass(frozen=True)
class Generated:
    """A generated pre-d-frame together with the data it came from."""

    pres: PreDFramePresentation
    cidl_plus: CIdl
    cidl_minus: CIdl
    sem_plus: tuple
    sem_minus: tuple
    dframe: DFrame

    @property
    def space(self) -> PairSpace:
        return self.dframe.space

    @cached_property
    def gens(self) -> GeneratorSet:
        return GeneratorSet.of(self.sem_plus, self.sem_minus)

    def embed(self, rel: Iterable) -> PairRelation:
        return PairRelation(self.space, frozenset((self.sem_plus[a], self.sem_minus[b]) for a, b in rel))

    @cached_property
    def con1(self) -> PairRelation:
        return self.embed(self.pres.con1)

    @cached_property
    def tot1(self) -> PairRelation:
        return self.embed(self.pres.tot1)


def generate_pre_dframe(p: PreDFramePresentation) -> Generated:
    """C-ideal frames on both sides with ``CON`` and ``TOT`` of the embedded generating relations."""
    cidl_p, cidl_m = enumerate_c_ideals(p.pres_plus), enumerate_c_ideals(p.pres_minus)
    sem_p, sem_m = sem_map(p.pres_plus, cidl_p), sem_map(p.pres_minus, cidl_m)
    space = PairSpace(cidl_p.frame, cidl_m.frame)

    def embed(rel):
        return PairRelation(space, frozenset((sem_p[a], sem_m[b]) for a, b in rel))

    d = DFrame(cidl_p.frame, cidl_m.frame, con_min(embed(p.con1)), tot_min(embed(p.tot1)))
    return Generated(p, cidl_p, cidl_m, sem_p, sem_m, d)


def verify_dfrm_universal(gen: Generated, M: DFrame, f_plus, f_minus,
                          check_unique: bool = True) -> DFrameHom:
    """Extend a presentation-preserving ``(f+, f-)`` into ``M`` to the unique d-frame hom."""
    p = gen.pres
    f_plus, f_minus = tuple(f_plus), tuple(f_minus)
    for side, pres, f, target in (("+", p.pres_plus, f_plus, M.plus), ("-", p.pres_minus, f_minus, M.minus)):
        bad = presentation_map_violation(pres, target, f)
        if bad is not None:
            raise PreconditionError(f"{side} map is not presentation-preserving ({bad[0]})", witness=bad)
    for name, rel, target in (("con1", p.con1, M.con), ("tot1", p.tot1, M.tot)):
        for a, b in sorted(rel):
            if (f_plus[a], f_minus[b]) not in target.members:
                raise PreconditionError(f"map does not preserve {name}", witness=(name, (a, b)))
    hp = extend_universal(p.pres_plus, f_plus, M.plus, gen.cidl_plus)
    hm = extend_universal(p.pres_minus, f_minus, M.minus, gen.cidl_minus)
    h = DFrameHom(hp, hm)
    check = is_dframe_hom(h, gen.dframe, M)
    if not check:
        raise AssertionError(f"extension is not a d-frame homomorphism: {check.witness}")
    if check_unique:
        cands = [DFrameHom(a, b)
                 for a in factoring_homs(p.pres_plus, f_plus, M.plus, gen.cidl_plus)
                 for b in factoring_homs(p.pres_minus, f_minus, M.minus, gen.cidl_minus)]
        cands = [c for c in cands if is_dframe_hom(c, gen.dframe, M)]
        if cands != [h]:
            raise AssertionError(f"{len(cands)} d-frame homs factor the map; expected exactly one")
    return h


def split_join_membership(dfr: DFrame, fam_plus: Iterable[int], fam_minus: Iterable[int]) -> bool:
    """Whether ``(V fam+, V fam-)`` lies in ``con``; computed directly and pairwise, which must agree."""
    fam_plus, fam_minus = list(fam_plus), list(fam_minus)
    direct = (dfr.plus.join_all(fam_plus), dfr.minus.join_all(fam_minus)) in dfr.con.members
    pairwise = all((a, b) in dfr.con.members for a in fam_plus for b in fam_minus)
    if direct != pairwise:
        raise AssertionError(f"join-decomposition disagrees: direct={direct}, pairwise={pairwise}")
    return direct
