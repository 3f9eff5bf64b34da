"""D-frames: two frames with consistency and totality relations.

Pairs ``(a, b)`` live in ``L+ x L-`` and are plain tuples of indices.
Two orders matter: the information order (componentwise) and the logical
order (the minus component reversed).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Sequence

from .errors import StructureError, limits
from .lattice import (
    CHAIN_3, FRAME_2, TRIVIAL_FRAME, FinFrame, FrameHom, bits, frame_hom_violation, frame_of_sets,
    mask_of,
)

Pair = tuple  # (plus index, minus index)


@dataclass(frozen=True)
class PairSpace:
    plus: FinFrame
    minus: FinFrame

    @property
    def tt(self) -> Pair:
        return (self.plus.top, self.minus.bottom)

    @property
    def ff(self) -> Pair:
        return (self.plus.bottom, self.minus.top)

    @property
    def bot(self) -> Pair:
        return (self.plus.bottom, self.minus.bottom)

    @property
    def top(self) -> Pair:
        return (self.plus.top, self.minus.top)

    def vee(self, a: Pair, b: Pair) -> Pair:
        return (self.plus.join[a[0]][b[0]], self.minus.meet[a[1]][b[1]])

    def wedge(self, a: Pair, b: Pair) -> Pair:
        return (self.plus.meet[a[0]][b[0]], self.minus.join[a[1]][b[1]])

    def sqcup(self, a: Pair, b: Pair) -> Pair:
        return (self.plus.join[a[0]][b[0]], self.minus.join[a[1]][b[1]])

    def sqcap(self, a: Pair, b: Pair) -> Pair:
        return (self.plus.meet[a[0]][b[0]], self.minus.meet[a[1]][b[1]])

    def leq(self, a: Pair, b: Pair) -> bool:
        """Logical order."""
        return self.plus.leq(a[0], b[0]) and self.minus.leq(b[1], a[1])

    def sqleq(self, a: Pair, b: Pair) -> bool:
        """Information order."""
        return self.plus.leq(a[0], b[0]) and self.minus.leq(a[1], b[1])

    @cached_property
    def pairs(self) -> tuple:
        return tuple(product(range(self.plus.size), range(self.minus.size)))

    def below(self, a: Pair) -> list:
        return [(x, y) for x in bits(self.plus.below_mask(a[0]))
                for y in bits(self.minus.below_mask(a[1]))]

    def above(self, a: Pair) -> list:
        return [(x, y) for x in bits(self.plus.above_mask(a[0]))
                for y in bits(self.minus.above_mask(a[1]))]

    def label(self, a: Pair) -> str:
        return f"({self.plus.labels[a[0]]},{self.minus.labels[a[1]]})"

    def check(self, a: Pair):
        if not (0 <= a[0] < self.plus.size and 0 <= a[1] < self.minus.size):
            raise StructureError(f"pair {a} out of range")


OPS = ("vee", "wedge", "sqcup", "sqcap")


def pair_op(space: PairSpace, op: str, a: Pair, b: Pair) -> Pair:
    """One of the four pair operations; logical ``vee``/``wedge``, information ``sqcup``/``sqcap``."""
    if op not in OPS:
        raise ValueError(f"unknown pair operation {op!r}")
    space.check(a)
    space.check(b)
    return getattr(space, op)(a, b)


@dataclass(frozen=True)
class PairRelation:
    """A subset of ``L+ x L-``; closure properties are checked, never assumed."""

    space: PairSpace
    members: frozenset

    @classmethod
    def of(cls, space: PairSpace, pairs: Iterable[Pair]) -> "PairRelation":
        pairs = frozenset(tuple(p) for p in pairs)
        for p in pairs:
            space.check(p)
        return cls(space, pairs)

    def __contains__(self, a) -> bool:
        return tuple(a) in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def _same(self, other: "PairRelation"):
        if other.space != self.space:
            raise StructureError("relations over different carriers")

    def __or__(self, other: "PairRelation") -> "PairRelation":
        self._same(other)
        return PairRelation(self.space, self.members | other.members)

    def __and__(self, other: "PairRelation") -> "PairRelation":
        self._same(other)
        return PairRelation(self.space, self.members & other.members)

    def __le__(self, other: "PairRelation") -> bool:
        self._same(other)
        return self.members <= other.members

    def with_pairs(self, pairs: Iterable[Pair]) -> "PairRelation":
        return PairRelation.of(self.space, self.members | set(map(tuple, pairs)))

    def matrix(self) -> list:
        return [[(p, m) in self.members for m in range(self.space.minus.size)]
                for p in range(self.space.plus.size)]

    def labelled(self) -> list:
        return [self.space.label(a) for a in self]


@dataclass(frozen=True)
class DFrame:
    plus: FinFrame
    minus: FinFrame
    con: PairRelation
    tot: PairRelation

    @classmethod
    def build(cls, plus: FinFrame, minus: FinFrame, con, tot) -> "DFrame":
        space = PairSpace(plus, minus)
        return cls(plus, minus, PairRelation.of(space, con), PairRelation.of(space, tot))

    @property
    def space(self) -> PairSpace:
        return self.con.space

    def is_trivial(self) -> bool:
        return self.plus.is_trivial() and self.minus.is_trivial()


AXIOMS = ("con-down", "tot-up", "con,tot-tt,ff", "con-wedge,vee", "tot-wedge,vee",
          "con-dirsup", "con-tot")


@dataclass(frozen=True)
class AxiomResult:
    axiom: str
    holds: bool
    witness: tuple | None = None


@dataclass(frozen=True)
class AxiomReport:
    results: tuple

    def __getitem__(self, axiom: str) -> AxiomResult:
        for r in self.results:
            if r.axiom == axiom:
                return r
        raise KeyError(axiom)

    @property
    def is_dframe(self) -> bool:
        return all(r.holds for r in self.results)

    @property
    def is_pre_dframe(self) -> bool:
        return all(r.holds for r in self.results if r.axiom != "con-tot")

    def failures(self) -> list:
        return [r for r in self.results if not r.holds]


def _down_violation(space, rel):
    for a in rel:
        for b in sorted(space.below(a)):
            if b not in rel.members:
                return (a, b)
    return None


def _up_violation(space, rel):
    for a in rel:
        for b in sorted(space.above(a)):
            if b not in rel.members:
                return (a, b)
    return None


def _wedge_vee_violation(space, rel):
    members = sorted(rel.members)
    for a in members:
        for b in members:
            if space.vee(a, b) not in rel.members:
                return (a, b, "vee")
            if space.wedge(a, b) not in rel.members:
                return (a, b, "wedge")
    return None


def is_directed(space: PairSpace, subset: Sequence[Pair]) -> bool:
    """Nonempty and every two members have an upper bound inside the subset."""
    if not subset:
        return False
    for a, b in combinations(subset, 2):
        if not any(space.sqleq(a, c) and space.sqleq(b, c) for c in subset):
            return False
    return True


def directed_sup(space: PairSpace, subset: Sequence[Pair]) -> Pair:
    acc = space.bot
    for a in subset:
        acc = space.sqcup(acc, a)
    return acc


def _dirsup_violation(space, rel, max_size):
    # fast path: a finite directed set contains its own maximum, so only
    # subsets up to max_size are enumerated literally as a cross-check
    members = sorted(rel.members)
    for k in range(1, max_size + 1):
        for sub in combinations(members, k):
            if is_directed(space, sub) and directed_sup(space, sub) not in rel.members:
                return sub
    return None


def contot_violation(space: PairSpace, con: Iterable[Pair], tot: Iterable[Pair]):
    """First ``(alpha, beta)`` breaking (con-tot): plus-sharing pairs scanned before minus-sharing."""
    con, tot = sorted(con), sorted(tot)
    for a in con:
        for b in tot:
            if a[0] == b[0] and not space.minus.leq(a[1], b[1]):
                return (a, b)
    for a in con:
        for b in tot:
            if a[1] == b[1] and not space.plus.leq(a[0], b[0]):
                return (a, b)
    return None


def check_axioms(d: DFrame, directed_cap: int | None = None) -> AxiomReport:
    """Evaluate all seven axioms, each with the first witness in scan order."""
    cap = limits().directed_subsets if directed_cap is None else directed_cap
    space, con, tot = d.space, d.con, d.tot
    ttff = None
    for name, rel in (("con", con), ("tot", tot)):
        for label, p in (("tt", space.tt), ("ff", space.ff)):
            if ttff is None and p not in rel.members:
                ttff = (name, label)
    witnesses = {
        "con-down": _down_violation(space, con),
        "tot-up": _up_violation(space, tot),
        "con,tot-tt,ff": ttff,
        "con-wedge,vee": _wedge_vee_violation(space, con),
        "tot-wedge,vee": _wedge_vee_violation(space, tot),
        "con-dirsup": _dirsup_violation(space, con, cap),
        "con-tot": contot_violation(space, con, tot),
    }
    return AxiomReport(tuple(AxiomResult(ax, witnesses[ax] is None, witnesses[ax]) for ax in AXIOMS))


# --- bispaces ---------------------------------------------------------------

def _is_topology(opens: frozenset, full: int) -> bool:
    if 0 not in opens or full not in opens:
        return False
    return all(a | b in opens and a & b in opens for a in opens for b in opens)


def _close_topology(subbasis: Iterable[int], full: int) -> frozenset:
    opens = {0, full, *subbasis}
    changed = True
    while changed:
        new = {a | b for a in opens for b in opens} | {a & b for a in opens for b in opens}
        changed = not new <= opens
        opens |= new
    return frozenset(opens)


@dataclass(frozen=True)
class FinBispace:
    """Finite bitopological space; opens are bitsets over ``points``."""

    points: tuple
    opens_plus: frozenset
    opens_minus: frozenset

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise StructureError("duplicate point names")
        full = self.full
        for name, opens in (("plus", self.opens_plus), ("minus", self.opens_minus)):
            if any(o & ~full for o in opens) or not _is_topology(opens, full):
                raise StructureError(f"{name} opens do not form a topology")

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    @classmethod
    def generate(cls, points: Sequence[str], plus: Iterable[Iterable[str]],
                 minus: Iterable[Iterable[str]]) -> "FinBispace":
        """Topologies generated by the given subbases (closed under finite unions/intersections)."""
        points = tuple(points)
        pos = {p: i for i, p in enumerate(points)}
        full = (1 << len(points)) - 1
        try:
            plus = [mask_of(pos[p] for p in s) for s in plus]
            minus = [mask_of(pos[p] for p in s) for s in minus]
        except KeyError as exc:
            raise StructureError(f"unknown point {exc.args[0]!r}") from None
        return cls(points, _close_topology(plus, full), _close_topology(minus, full))

    def set_label(self, mask: int) -> str:
        return "{" + ",".join(self.points[i] for i in bits(mask)) + "}"


def topologies(n: int) -> list:
    """Every topology on ``n`` labelled points, as frozensets of bitsets."""
    full = (1 << n) - 1
    middle = [m for m in range(1, full)]
    out = []
    for choice in range(1 << len(middle)):
        fam = frozenset([0, full] + [middle[k] for k in bits(choice)])
        if _is_topology(fam, full):
            out.append(fam)
    return out


def all_bispaces(n: int) -> list:
    points = tuple(f"p{i}" for i in range(n))
    tops = topologies(n)
    return [FinBispace(points, a, b) for a in tops for b in tops]


def _open_frame(X: FinBispace, opens: frozenset) -> FinFrame:
    sets = sorted(opens, key=lambda m: (m.bit_count(), m))
    return frame_of_sets(sets, [X.set_label(m) for m in sets])


def omega_d(X: FinBispace) -> DFrame:
    """Opens of both topologies; ``con`` = disjoint pairs, ``tot`` = covering pairs."""
    plus_sets = sorted(X.opens_plus, key=lambda m: (m.bit_count(), m))
    minus_sets = sorted(X.opens_minus, key=lambda m: (m.bit_count(), m))
    plus, minus = _open_frame(X, X.opens_plus), _open_frame(X, X.opens_minus)
    con = [(i, j) for i, u in enumerate(plus_sets) for j, v in enumerate(minus_sets) if not u & v]
    tot = [(i, j) for i, u in enumerate(plus_sets) for j, v in enumerate(minus_sets)
           if u | v == X.full]
    return DFrame.build(plus, minus, con, tot)


# --- homomorphisms ----------------------------------------------------------

@dataclass(frozen=True)
class DFrameHom:
    plus: FrameHom
    minus: FrameHom

    def __call__(self, a: Pair) -> Pair:
        return (self.plus.map[a[0]], self.minus.map[a[1]])

    def compose(self, after: "DFrameHom") -> "DFrameHom":
        return DFrameHom(self.plus.compose(after.plus), self.minus.compose(after.minus))


def identity_hom(d: DFrame) -> DFrameHom:
    return DFrameHom(FrameHom(d.plus, d.plus, tuple(range(d.plus.size))),
                     FrameHom(d.minus, d.minus, tuple(range(d.minus.size))))


@dataclass(frozen=True)
class HomCheck:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def is_dframe_hom(h: DFrameHom, src: DFrame, dst: DFrame) -> HomCheck:
    """True iff ``h`` carries ``con`` into ``con`` and ``tot`` into ``tot``."""
    for side, comp, a, b in (("plus", h.plus, src.plus, dst.plus),
                             ("minus", h.minus, src.minus, dst.minus)):
        if comp.source != a or comp.target != b:
            raise StructureError(f"{side} component has the wrong source or target")
        bad = frame_hom_violation(a, b, comp.map)
        if bad is not None:
            raise StructureError(f"{side} component is not a frame hom ({bad[0]})", witness=bad)
    for name, s_rel, d_rel in (("con", src.con, dst.con), ("tot", src.tot, dst.tot)):
        for a in s_rel:
            if h(a) not in d_rel.members:
                return HomCheck(False, (name, a, h(a)))
    return HomCheck(True)


def enumerate_dframe_homs(src: DFrame, dst: DFrame) -> list:
    from .lattice import enumerate_homs
    plus = enumerate_homs(src.plus, dst.plus)
    minus = enumerate_homs(src.minus, dst.minus)
    return [h for h in (DFrameHom(p, m) for p in plus for m in minus) if is_dframe_hom(h, src, dst)]


# --- named instances --------------------------------------------------------

def sierpinski_bispace() -> FinBispace:
    return FinBispace.generate(("x", "y"), [["y"]], [["x"]])


def one_point_bispace() -> FinBispace:
    return FinBispace.generate(("x",), [], [])


TWO_D = DFrame.build(FRAME_2, FRAME_2, [(0, 0), (0, 1), (1, 0)], [(1, 1), (1, 0), (0, 1)])
# CHAIN_3 indices: 0 < m=1 < 1=2
SIER = DFrame.build(
    CHAIN_3, CHAIN_3,
    [(0, 0), (0, 1), (0, 2), (1, 0), (2, 0), (1, 1)],
    [(2, 0), (2, 1), (2, 2), (0, 2), (1, 2), (1, 1)],
)
TRIVIAL_D = DFrame.build(TRIVIAL_FRAME, TRIVIAL_FRAME, [(0, 0)], [(0, 0)])


def frame_isos(a: FinFrame, b: FinFrame) -> list:
    """Frame isomorphisms ``a -> b`` (bijective homs between finite lattices)."""
    from .lattice import enumerate_homs
    if a.size != b.size:
        return []
    return [h for h in enumerate_homs(a, b) if len(set(h.map)) == b.size]


def dframe_iso(a: DFrame, b: DFrame) -> DFrameHom | None:
    """A d-frame isomorphism ``a -> b`` carrying ``con`` onto ``con`` and ``tot`` onto ``tot``, if any."""
    for hp in frame_isos(a.plus, b.plus):
        for hm in frame_isos(a.minus, b.minus):
            h = DFrameHom(hp, hm)
            if ({h(x) for x in a.con.members} == b.con.members
                    and {h(x) for x in a.tot.members} == b.tot.members):
                return h
    return None
