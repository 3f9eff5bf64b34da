"""Finite posets, finite frames (= finite distributive lattices) and frame homs.

Elements are dense integer indices in declaration order; sets of elements
are Python ints used as bitsets (bit ``i`` set iff element ``i`` is a member).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Hashable, Iterable, Sequence

from .errors import CapacityError, StructureError, limits


def bits(mask: int) -> Iterable[int]:
    """Indices of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class FinPoset:
    """A finite partial order; ``below[i]`` is the bitset of ``{j | j <= i}``."""

    labels: tuple
    below: tuple

    @classmethod
    def from_relation(cls, labels: Sequence[Hashable], pairs: Iterable[tuple[int, int]]):
        """Reflexive-transitive closure of a generating relation ``a <= b``."""
        labels = tuple(labels)
        n = len(labels)
        if len(set(labels)) != n:
            raise StructureError("duplicate element labels")
        below = [1 << i for i in range(n)]
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise StructureError(f"order pair ({a}, {b}) out of range")
            below[b] |= 1 << a
        changed = True
        while changed:
            changed = False
            for i in range(n):
                acc = below[i]
                for j in bits(below[i]):
                    acc |= below[j]
                if acc != below[i]:
                    below[i] = acc
                    changed = True
        poset = cls(labels, tuple(below))
        bad = poset.antisymmetry_violation()
        if bad is not None:
            a, b = bad
            raise StructureError(
                f"antisymmetry violated: {labels[a]} <= {labels[b]} and {labels[b]} <= {labels[a]}",
                witness=bad,
            )
        return poset

    @property
    def size(self) -> int:
        return len(self.labels)

    def leq(self, a: int, b: int) -> bool:
        return bool(self.below[b] >> a & 1)

    @cached_property
    def above(self) -> tuple:
        up = [0] * self.size
        for i in range(self.size):
            for j in bits(self.below[i]):
                up[j] |= 1 << i
        return tuple(up)

    @cached_property
    def _index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise StructureError(f"unknown element {label!r}") from None

    def antisymmetry_violation(self):
        for a in range(self.size):
            for b in bits(self.below[a]):
                if b != a and self.leq(a, b):
                    return (min(a, b), max(a, b))
        return None

    def transitivity_violation(self):
        for a in range(self.size):
            for b in bits(self.above[a]):
                for c in bits(self.above[b]):
                    if not self.leq(a, c):
                        return (a, b, c)
        return None

    def downset(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.below[i]
        return out

    def upset(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= self.above[i]
        return out

    def linear_extension(self) -> list:
        """Elements sorted so that every element precedes everything above it."""
        return sorted(range(self.size), key=lambda i: (self.below[i].bit_count(), i))

    def hasse_edges(self) -> list:
        edges = []
        for b in range(self.size):
            strict = self.below[b] & ~(1 << b)
            for a in bits(strict):
                between = strict & self.above[a] & ~(1 << a)
                if not between:
                    edges.append((a, b))
        return edges


@dataclass(frozen=True)
class FinFrame:
    """A finite bounded lattice given by its order and operation tables.

    Whether it is a frame (distributive) is decided by :func:`validate_frame`;
    constructors only guarantee the tables are well-formed.
    """

    poset: FinPoset
    bottom: int
    top: int
    meet: tuple
    join: tuple

    @classmethod
    def from_poset(cls, poset: FinPoset) -> "FinFrame":
        """Derive meet/join tables; fails if some pair lacks a glb or lub."""
        n = poset.size
        if n == 0:
            raise StructureError("a frame needs at least one element")
        full = (1 << n) - 1
        meet = [[0] * n for _ in range(n)]
        join = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                lower = poset.below[a] & poset.below[b]
                upper = poset.above[a] & poset.above[b]
                glb = _greatest(poset, lower)
                lub = _least(poset, upper)
                if glb is None:
                    raise StructureError(
                        f"no meet for {poset.labels[a]} and {poset.labels[b]}", witness=(a, b))
                if lub is None:
                    raise StructureError(
                        f"no join for {poset.labels[a]} and {poset.labels[b]}", witness=(a, b))
                meet[a][b] = meet[b][a] = glb
                join[a][b] = join[b][a] = lub
        bottom = _least(poset, full)
        top = _greatest(poset, full)
        if bottom is None or top is None:
            raise StructureError("lattice has no bottom or top")
        return cls(poset, bottom, top, tuple(map(tuple, meet)), tuple(map(tuple, join)))

    @classmethod
    def from_leq(cls, labels, pairs) -> "FinFrame":
        labels = tuple(labels)
        idx = {lab: i for i, lab in enumerate(labels)}
        try:
            pairs = [(idx[a], idx[b]) for a, b in pairs]
        except KeyError as exc:
            raise StructureError(f"unknown element {exc.args[0]!r}") from None
        return cls.from_poset(FinPoset.from_relation(labels, pairs))

    @property
    def size(self) -> int:
        return self.poset.size

    @property
    def labels(self) -> tuple:
        return self.poset.labels

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def index(self, label) -> int:
        return self.poset.index(label)

    def leq(self, a: int, b: int) -> bool:
        return self.poset.leq(a, b)

    def join_all(self, elems: Iterable[int]) -> int:
        acc = self.bottom
        for e in elems:
            acc = self.join[acc][e]
        return acc

    def meet_all(self, elems: Iterable[int]) -> int:
        acc = self.top
        for e in elems:
            acc = self.meet[acc][e]
        return acc

    def join_mask(self, mask: int) -> int:
        return self.join_all(bits(mask))

    def meet_mask(self, mask: int) -> int:
        return self.meet_all(bits(mask))

    def below_mask(self, a: int) -> int:
        return self.poset.below[a]

    def above_mask(self, a: int) -> int:
        return self.poset.above[a]

    @cached_property
    def join_irreducibles(self) -> int:
        """Bitset of elements that are not the join of the elements strictly below."""
        out = 0
        for a in range(self.size):
            strict = self.poset.below[a] & ~(1 << a)
            if self.join_mask(strict) != a:
                out |= 1 << a
        return out

    def is_trivial(self) -> bool:
        return self.size == 1

    def __repr__(self):
        return f"FinFrame({list(self.labels)})"


def _least(poset: FinPoset, mask: int):
    for i in bits(mask):
        if poset.above[i] & mask == mask:
            return i
    return None


def _greatest(poset: FinPoset, mask: int):
    for i in bits(mask):
        if poset.below[i] & mask == mask:
            return i
    return None


@dataclass(frozen=True)
class FrameReport:
    ok: bool
    law: str | None = None
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def validate_frame(frame: FinFrame) -> FrameReport:
    """Check that ``frame`` is a bounded distributive lattice consistent with its order.

    Malformed tables raise :class:`StructureError`; law violations are returned
    with the first witness in index order.
    """
    n = frame.size
    for name, table in (("meet", frame.meet), ("join", frame.join)):
        if len(table) != n or any(len(row) != n for row in table):
            raise StructureError(f"{name} table is not {n}x{n}")
        for row in table:
            for v in row:
                if not (isinstance(v, int) and 0 <= v < n):
                    raise StructureError(f"{name} table entry {v!r} out of range")
    if not (0 <= frame.bottom < n and 0 <= frame.top < n):
        raise StructureError("bottom/top index out of range")
    if len(frame.poset.below) != n:
        raise StructureError("order has wrong size")

    poset = frame.poset
    for i in range(n):
        if not poset.below[i] >> i & 1:
            return FrameReport(False, "reflexivity", (i,))
    bad = poset.antisymmetry_violation()
    if bad is not None:
        return FrameReport(False, "antisymmetry", bad)
    bad = poset.transitivity_violation()
    if bad is not None:
        return FrameReport(False, "transitivity", bad)
    for x in range(n):
        if not poset.leq(frame.bottom, x):
            return FrameReport(False, "bottom", (x,))
        if not poset.leq(x, frame.top):
            return FrameReport(False, "top", (x,))
    for a in range(n):
        for b in range(n):
            m, j = frame.meet[a][b], frame.join[a][b]
            if poset.below[m] != poset.below[a] & poset.below[b]:
                return FrameReport(False, "meet", (a, b))
            if poset.above[j] != poset.above[a] & poset.above[b]:
                return FrameReport(False, "join", (a, b))
    meet, join = frame.meet, frame.join
    for b in range(n):
        for a in range(n):
            for c in range(n):
                if meet[b][join[a][c]] != join[meet[b][a]][meet[b][c]]:
                    return FrameReport(False, "distributivity", (b, a, c))
    return FrameReport(True)


def downset(frame: FinFrame, elems) -> int:
    """``{x | x <= s for some s in elems}``; ``elems`` is a bitset or an iterable."""
    mask = elems if isinstance(elems, int) else mask_of(elems)
    if mask >> frame.size:
        raise StructureError("element index out of range")
    return frame.poset.downset(mask)


def upset(frame: FinFrame, elems) -> int:
    mask = elems if isinstance(elems, int) else mask_of(elems)
    if mask >> frame.size:
        raise StructureError("element index out of range")
    return frame.poset.upset(mask)


@dataclass(frozen=True)
class FrameHom:
    source: FinFrame
    target: FinFrame
    map: tuple

    def __call__(self, x: int) -> int:
        return self.map[x]

    def compose(self, after: "FrameHom") -> "FrameHom":
        """``after . self``."""
        if after.source != self.target:
            raise StructureError("composing homs with mismatched frames")
        return FrameHom(self.source, after.target, tuple(after.map[y] for y in self.map))

    def __repr__(self):
        src, dst = self.source.labels, self.target.labels
        pairs = ", ".join(f"{src[i]}->{dst[y]}" for i, y in enumerate(self.map))
        return f"FrameHom({pairs})"


def frame_hom_violation(src: FinFrame, dst: FinFrame, fmap: Sequence[int]):
    """First law a map breaks (as ``(law, witness)``) or ``None`` for a frame hom."""
    if len(fmap) != src.size or any(not 0 <= y < dst.size for y in fmap):
        raise StructureError("map is not a total function between the carriers")
    if fmap[src.bottom] != dst.bottom:
        return ("bottom", (src.bottom,))
    if fmap[src.top] != dst.top:
        return ("top", (src.top,))
    for a in range(src.size):
        for b in range(a + 1, src.size):
            if fmap[src.meet[a][b]] != dst.meet[fmap[a]][fmap[b]]:
                return ("meet", (a, b))
            if fmap[src.join[a][b]] != dst.join[fmap[a]][fmap[b]]:
                return ("join", (a, b))
    return None


def is_frame_hom(src: FinFrame, dst: FinFrame, fmap: Sequence[int]) -> bool:
    return frame_hom_violation(src, dst, fmap) is None


def enumerate_homs(src: FinFrame, dst: FinFrame, capacity: int | None = None) -> list:
    """All frame homomorphisms ``src -> dst`` by pruned backtracking."""
    cap = limits().hom_space if capacity is None else capacity
    if dst.size ** src.size > cap:
        raise CapacityError(
            f"hom space {dst.size}^{src.size} exceeds capacity {cap}")
    order = src.poset.linear_extension()
    pos = {x: k for k, x in enumerate(order)}
    # pairs (a, b) whose meet/join check becomes decidable once element order[k] is placed
    checks = [[] for _ in order]
    for a in range(src.size):
        for b in range(a + 1, src.size):
            m, j = src.meet[a][b], src.join[a][b]
            last = max(pos[a], pos[b], pos[m], pos[j])
            checks[last].append((a, b, m, j))
    image = [-1] * src.size
    out = []

    def candidates(x):
        if x == src.bottom:
            return (dst.bottom,)
        if x == src.top:
            return (dst.top,)
        lower = dst.join_all(image[y] for y in bits(src.poset.below[x] & ~(1 << x)))
        return tuple(bits(dst.poset.above[lower]))

    def go(k):
        if k == len(order):
            out.append(FrameHom(src, dst, tuple(image)))
            return
        x = order[k]
        for y in candidates(x):
            image[x] = y
            if all(image[m] == dst.meet[image[a]][image[b]]
                   and image[j] == dst.join[image[a]][image[b]]
                   for a, b, m, j in checks[k]):
                go(k + 1)
        image[x] = -1

    go(0)
    return out


# --- named frames -----------------------------------------------------------

def chain(n: int, labels: Sequence[str] | None = None) -> FinFrame:
    labels = tuple(labels) if labels else tuple(str(i) for i in range(n))
    return FinFrame.from_leq(labels, [(labels[i], labels[i + 1]) for i in range(n - 1)])


def powerset(n: int) -> FinFrame:
    """Boolean algebra on ``n`` atoms; element ``i`` is the subset with bitmask ``i``."""
    labels = ["{" + ",".join(str(k) for k in bits(i)) + "}" for i in range(1 << n)]
    pairs = [(i, i | 1 << k) for i in range(1 << n) for k in range(n) if not i >> k & 1]
    return FinFrame.from_poset(FinPoset.from_relation(labels, pairs))


def downset_lattice(poset: FinPoset) -> FinFrame:
    """Downsets of ``poset`` under inclusion (every finite distributive lattice arises so)."""
    sets = sorted(_enumerate_downsets(poset), key=lambda m: (m.bit_count(), m))
    labels = ["{" + ",".join(str(poset.labels[i]) for i in bits(m)) + "}" for m in sets]
    return frame_of_sets(sets, labels)


def frame_of_sets(sets: Sequence[int], labels: Sequence[str]) -> FinFrame:
    """Inclusion-ordered family of bitsets closed under ``&`` and ``|``."""
    n = len(sets)
    pos = {s: i for i, s in enumerate(sets)}
    below = tuple(mask_of(j for j in range(n) if sets[j] & ~sets[i] == 0) for i in range(n))
    try:
        meet = tuple(tuple(pos[sets[a] & sets[b]] for b in range(n)) for a in range(n))
        join = tuple(tuple(pos[sets[a] | sets[b]] for b in range(n)) for a in range(n))
    except KeyError:
        raise StructureError("family is not closed under union and intersection") from None
    bottom = min(range(n), key=lambda i: sets[i].bit_count())
    top = max(range(n), key=lambda i: sets[i].bit_count())
    return FinFrame(FinPoset(tuple(labels), below), bottom, top, meet, join)


def _enumerate_downsets(poset: FinPoset) -> list:
    order = poset.linear_extension()
    out = []

    def go(k, acc):
        if k == len(order):
            out.append(acc)
            return
        x = order[k]
        go(k + 1, acc)
        strict = poset.below[x] & ~(1 << x)
        if strict & acc == strict:
            go(k + 1, acc | 1 << x)

    go(0, 0)
    return out


def enumerate_downsets(poset: FinPoset) -> list:
    return _enumerate_downsets(poset)


FRAME_2 = chain(2)
CHAIN_3 = chain(3, ("0", "m", "1"))
DIAMOND = FinFrame.from_leq(("0", "a", "b", "1"), [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])
TRIVIAL_FRAME = chain(1, ("0",))
# the pentagon is a lattice but not distributive
N5 = FinFrame.from_leq(
    ("0", "a", "b", "c", "1"),
    [("0", "a"), ("a", "b"), ("b", "1"), ("0", "c"), ("c", "1")],
)


def product_frame(*frames: FinFrame) -> FinFrame:
    """Cartesian product with componentwise order (used for test instances)."""
    elems = list(product(*(range(f.size) for f in frames)))
    pos = {e: i for i, e in enumerate(elems)}
    labels = ["(" + ",".join(str(f.labels[x]) for f, x in zip(frames, e)) + ")" for e in elems]
    pairs = []
    for e in elems:
        for k, f in enumerate(frames):
            for y in bits(f.poset.above[e[k]]):
                if y != e[k]:
                    pairs.append((pos[e], pos[e[:k] + (y,) + e[k + 1:]]))
    return FinFrame.from_poset(FinPoset.from_relation(labels, pairs))
