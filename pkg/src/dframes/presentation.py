"""Frame presentations by a meet-semilattice of generators and a cover relation.

The presented frame is the lattice of C-ideals: downsets of the base that
are saturated under every cover ``U |- a`` (``U`` inside the ideal forces
``a`` into it). Ideals are bitsets over the base.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence

from .errors import CapacityError, PreconditionError, StructureError, limits
from .lattice import (
    FinFrame, FinPoset, FrameHom, _enumerate_downsets, bits, enumerate_homs,
    frame_hom_violation, mask_of,
)

CIdeal = int  # bitset of base elements


@dataclass(frozen=True)
class MeetSemilattice:
    poset: FinPoset
    top: int
    meet: tuple

    @classmethod
    def from_poset(cls, poset: FinPoset) -> "MeetSemilattice":
        n = poset.size
        full = (1 << n) - 1
        top = next((i for i in range(n) if poset.below[i] == full), None)
        if top is None:
            raise StructureError("meet-semilattice needs a top element")
        meet = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                lower = poset.below[a] & poset.below[b]
                glb = next((i for i in bits(lower) if poset.below[i] & lower == lower), None)
                if glb is None:
                    raise StructureError(
                        f"no meet for {poset.labels[a]} and {poset.labels[b]}", witness=(a, b))
                meet[a][b] = meet[b][a] = glb
        return cls(poset, top, tuple(map(tuple, meet)))

    @classmethod
    def from_leq(cls, labels, pairs) -> "MeetSemilattice":
        labels = tuple(labels)
        idx = {lab: i for i, lab in enumerate(labels)}
        return cls.from_poset(FinPoset.from_relation(labels, [(idx[a], idx[b]) for a, b in pairs]))

    @classmethod
    def from_frame(cls, frame: FinFrame) -> "MeetSemilattice":
        return cls(frame.poset, frame.top, frame.meet)

    @property
    def size(self) -> int:
        return self.poset.size

    @property
    def labels(self) -> tuple:
        return self.poset.labels

    def index(self, label) -> int:
        return self.poset.index(label)

    def leq(self, a: int, b: int) -> bool:
        return self.poset.leq(a, b)


def free_meet_semilattice(generators: Sequence[str]) -> MeetSemilattice:
    """Finite meets of ``generators`` (top = empty meet), labelled ``g&h``."""
    gens = tuple(generators)
    subsets = [frozenset(c) for r in range(len(gens) + 1) for c in combinations(gens, r)]
    subsets.sort(key=lambda s: (-len(s), sorted(gens.index(g) for g in s)))

    def label(s):
        return "&".join(g for g in gens if g in s) if s else "1"

    labels = [label(s) for s in subsets]
    pairs = [(i, j) for i, s in enumerate(subsets) for j, t in enumerate(subsets) if s >= t]
    return MeetSemilattice.from_poset(FinPoset.from_relation(labels, pairs))


@dataclass(frozen=True)
class Cover:
    """``coverers |- covered``: the join of ``coverers`` equals ``covered``."""

    covered: int
    coverers: frozenset = field(default_factory=frozenset)

    @property
    def mask(self) -> int:
        return mask_of(self.coverers)

    def sort_key(self):
        return (self.covered, sorted(self.coverers))


def _sorted_covers(covers) -> tuple:
    return tuple(sorted(set(covers), key=Cover.sort_key))


@dataclass(frozen=True)
class FramePresentation:
    base: MeetSemilattice
    covers: tuple = ()
    stable: bool = False

    def __post_init__(self):
        object.__setattr__(self, "covers", _sorted_covers(self.covers))
        n = self.base.size
        for c in self.covers:
            if not 0 <= c.covered < n or any(not 0 <= u < n for u in c.coverers):
                raise StructureError("cover refers to an element outside the base", witness=c)
            if c.mask & ~self.base.poset.below[c.covered]:
                raise StructureError(
                    "malformed cover: some coverer is not below the covered element", witness=c)

    @cached_property
    def _engine(self) -> tuple:
        below = self.base.poset.below
        return tuple((c.mask, c.covered, below[c.covered]) for c in self.covers)

    def describe_cover(self, c: Cover) -> str:
        labs = self.base.labels
        return f"{labs[c.covered]} <= " + " ".join(labs[u] for u in sorted(c.coverers))


def stability_close(pres: FramePresentation) -> FramePresentation:
    """Least superset of the covers closed under ``{u & b : u in U} |- b`` for ``b <= a``."""
    base = pres.base
    seen = set(pres.covers)
    work = list(pres.covers)
    while work:
        c = work.pop()
        for b in bits(base.poset.below[c.covered]):
            new = Cover(b, frozenset(base.meet[u][b] for u in c.coverers))
            if new not in seen:
                seen.add(new)
                work.append(new)
    return FramePresentation(base, tuple(seen), stable=True)


def is_stable(pres: FramePresentation) -> bool:
    return set(stability_close(pres).covers) == set(pres.covers)


def _require_stable(pres: FramePresentation):
    if not pres.stable:
        raise PreconditionError("presentation is not stability-closed; call stability_close first")


def _saturate(pres: FramePresentation, ideal: int) -> int:
    engine = pres._engine
    changed = True
    while changed:
        changed = False
        for umask, a, down_a in engine:
            if not ideal >> a & 1 and umask & ideal == umask:
                ideal |= down_a
                changed = True
    return ideal


def c_ideal_generate(pres: FramePresentation, members) -> CIdeal:
    """The smallest C-ideal containing ``members`` (a bitset or iterable of indices)."""
    _require_stable(pres)
    mask = members if isinstance(members, int) else mask_of(members)
    return _saturate(pres, pres.base.poset.downset(mask))


def is_c_ideal(pres: FramePresentation, ideal: int) -> bool:
    if pres.base.poset.downset(ideal) != ideal:
        return False
    return all(ideal >> a & 1 or umask & ideal != umask for umask, a, _ in pres._engine)


@dataclass(frozen=True)
class CIdl:
    """The frame of C-ideals together with the ideal each element stands for."""

    pres: FramePresentation
    ideals: tuple
    frame: FinFrame

    @cached_property
    def _pos(self) -> dict:
        return {m: i for i, m in enumerate(self.ideals)}

    def index(self, ideal: int) -> int:
        return self._pos[ideal]

    def ideal(self, i: int) -> int:
        return self.ideals[i]


def ideal_label(base: MeetSemilattice, ideal: int) -> str:
    return "{" + ",".join(str(base.labels[i]) for i in bits(ideal)) + "}"


def enumerate_c_ideals(pres: FramePresentation, capacity: int | None = None) -> CIdl:
    """All C-ideals ordered by inclusion; meets are intersections, joins ``<union>``."""
    _require_stable(pres)
    cap = limits().ideal_base if capacity is None else capacity
    n = pres.base.size
    if n > cap:
        raise CapacityError(f"base has {n} elements; ideal enumeration capacity is {cap}")
    ideals = [d for d in _enumerate_downsets(pres.base.poset) if is_c_ideal(pres, d)]
    ideals.sort(key=lambda m: (m.bit_count(), m))
    pos = {m: i for i, m in enumerate(ideals)}
    k = len(ideals)
    below = tuple(mask_of(j for j in range(k) if ideals[j] & ~ideals[i] == 0) for i in range(k))
    meet = [[0] * k for _ in range(k)]
    join = [[0] * k for _ in range(k)]
    for a in range(k):
        for b in range(a, k):
            meet[a][b] = meet[b][a] = pos[ideals[a] & ideals[b]]
            join[a][b] = join[b][a] = pos[c_ideal_generate(pres, ideals[a] | ideals[b])]
    labels = tuple(ideal_label(pres.base, m) for m in ideals)
    frame = FinFrame(FinPoset(labels, below), 0, k - 1, tuple(map(tuple, meet)), tuple(map(tuple, join)))
    return CIdl(pres, tuple(ideals), frame)


def presentation_map_violation(pres: FramePresentation, target: FinFrame, f: Sequence[int]):
    """Why ``f: B -> target`` is not a meet-hom turning covers into joins, or ``None``."""
    base = pres.base
    if len(f) != base.size or any(not 0 <= y < target.size for y in f):
        raise StructureError("map is not a total function from the base into the frame")
    if f[base.top] != target.top:
        return ("top", (base.top,))
    for a in range(base.size):
        for b in range(a + 1, base.size):
            if f[base.meet[a][b]] != target.meet[f[a]][f[b]]:
                return ("meet", (a, b))
    for c in pres.covers:
        if target.join_all(f[u] for u in c.coverers) != f[c.covered]:
            return ("cover", c)
    return None


def sem_map(pres: FramePresentation, cidl: CIdl | None = None) -> tuple:
    """``b -> <{b}>`` as indices into the C-ideal frame; verified presentation-preserving."""
    cidl = cidl or enumerate_c_ideals(pres)
    sem = tuple(cidl.index(c_ideal_generate(pres, 1 << b)) for b in range(pres.base.size))
    bad = presentation_map_violation(pres, cidl.frame, sem)
    if bad is not None:
        raise AssertionError(f"semantic map fails {bad[0]} at {bad[1]}")
    return sem


def extend_universal(pres: FramePresentation, f: Sequence[int], target: FinFrame,
                     cidl: CIdl | None = None, check_unique: bool = False) -> FrameHom:
    """The unique frame hom ``fbar`` on C-ideals with ``f = fbar . sem``; ``fbar(I) = V f[I]``."""
    f = tuple(f)
    bad = presentation_map_violation(pres, target, f)
    if bad is not None:
        raise PreconditionError(f"map is not presentation-preserving ({bad[0]})", witness=bad)
    cidl = cidl or enumerate_c_ideals(pres)
    fbar = FrameHom(cidl.frame, target,
                    tuple(target.join_all(f[b] for b in bits(I)) for I in cidl.ideals))
    if frame_hom_violation(cidl.frame, target, fbar.map) is not None:
        raise AssertionError("extension is not a frame homomorphism")
    sem = sem_map(pres, cidl)
    if any(fbar.map[sem[b]] != f[b] for b in range(pres.base.size)):
        raise AssertionError("extension does not factor the map through sem")
    if check_unique:
        count = len(factoring_homs(pres, f, target, cidl))
        if count != 1:
            raise AssertionError(f"{count} frame homs factor the map; expected exactly one")
    return fbar


def factoring_homs(pres: FramePresentation, f: Sequence[int], target: FinFrame,
                   cidl: CIdl | None = None) -> list:
    """Every enumerated frame hom ``h`` on C-ideals with ``h . sem = f``."""
    cidl = cidl or enumerate_c_ideals(pres)
    sem = sem_map(pres, cidl)
    return [h for h in enumerate_homs(cidl.frame, target)
            if all(h.map[sem[b]] == f[b] for b in range(pres.base.size))]


def presentation_of_frame(frame: FinFrame) -> FramePresentation:
    """A frame presented by itself: ``{} |- 0`` plus ``{x, y} |- x v y`` for every pair.

    Its C-ideals are exactly the principal downsets, so the presented frame
    is isomorphic to ``frame``.
    """
    base = MeetSemilattice.from_frame(frame)
    covers = [Cover(frame.bottom, frozenset())]
    covers += [Cover(frame.join[x][y], frozenset({x, y}))
               for x in range(frame.size) for y in range(x + 1, frame.size)]
    return stability_close(FramePresentation(base, tuple(covers)))
