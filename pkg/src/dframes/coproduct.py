"""Coproducts of finite frames and d-frames via C-ideals of the restricted product.

For a finite family the restricted product is the full product of the
carriers; its tuples are the generators. Covers ``{a_k *_j u} |- (V a_k) *_j u``
(including the empty family) make the C-ideals the coproduct frame, whose
bottom is ``n``, the set of tuples with some zero coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Sequence

from .closure import Generated, PreDFramePresentation, con_min, tot_min, verify_dfrm_universal
from .conditions import LadderData, check_indep, check_mu
from .dframe import (
    DFrame, DFrameHom, PairRelation, PairSpace, check_axioms, enumerate_dframe_homs, is_dframe_hom,
)
from .errors import CapacityError, PreconditionError, StructureError, limits
from .lattice import FinFrame, FinPoset, FrameHom, bits, frame_hom_violation, mask_of
from .presentation import (
    CIdl, Cover, FramePresentation, MeetSemilattice, enumerate_c_ideals, is_stable, sem_map,
)


@dataclass(frozen=True)
class RestrictedProduct:
    components: tuple

    @cached_property
    def tuples(self) -> tuple:
        return tuple(product(*(range(f.size) for f in self.components)))

    @cached_property
    def _pos(self) -> dict:
        return {t: i for i, t in enumerate(self.tuples)}

    def index(self, t) -> int:
        return self._pos[tuple(t)]

    @property
    def size(self) -> int:
        return len(self.tuples)

    @property
    def ones(self) -> tuple:
        return tuple(f.top for f in self.components)

    def star(self, a: int, j: int, u) -> tuple:
        """``a *_j u``: coordinate ``j`` replaced by ``a``."""
        u = tuple(u)
        return u[:j] + (a,) + u[j + 1:]

    def leq(self, u, v) -> bool:
        return all(f.leq(x, y) for f, x, y in zip(self.components, u, v))

    def meet(self, u, v) -> tuple:
        return tuple(f.meet[x][y] for f, x, y in zip(self.components, u, v))

    def in_n(self, u) -> bool:
        return any(x == f.bottom for f, x in zip(self.components, u))

    @cached_property
    def n_mask(self) -> int:
        return mask_of(i for i, t in enumerate(self.tuples) if self.in_n(t))

    def label(self, t) -> str:
        return "(" + ",".join(str(f.labels[x]) for f, x in zip(self.components, t)) + ")"

    @cached_property
    def semilattice(self) -> MeetSemilattice:
        ts = self.tuples
        below = tuple(mask_of(j for j, s in enumerate(ts) if self.leq(s, t)) for t in ts)
        meet = tuple(tuple(self.index(self.meet(s, t)) for t in ts) for s in ts)
        poset = FinPoset(tuple(self.label(t) for t in ts), below)
        return MeetSemilattice(poset, self.index(self.ones), meet)


def cover_shapes(prod: RestrictedProduct):
    """Yield ``(j, u, K)`` for every cover ``{a *_j u : a in K} |- (V K) *_j u``; ``u_j`` is fixed to top."""
    for j, f in enumerate(prod.components):
        for u in prod.tuples:
            if u[j] != f.top:
                continue
            for kmask in range(1 << f.size):
                yield j, u, tuple(bits(kmask))


def coproduct_covers(prod: RestrictedProduct) -> tuple:
    covers = set()
    for j, u, K in cover_shapes(prod):
        f = prod.components[j]
        covered = prod.index(prod.star(f.join_all(K), j, u))
        covers.add(Cover(covered, frozenset(prod.index(prod.star(a, j, u)) for a in K)))
    return tuple(covers)


@dataclass(frozen=True)
class FrameCoproduct:
    product: RestrictedProduct
    pres: FramePresentation
    cidl: CIdl
    sem: tuple
    injections: tuple  # FrameHom per component

    @property
    def frame(self) -> FinFrame:
        return self.cidl.frame

    @property
    def n(self) -> int:
        return self.product.n_mask

    def oplus(self, a: int, j: int, u=None) -> int:
        """``a (+)_j u`` as an element index of the coproduct frame."""
        u = self.product.ones if u is None else u
        return self.sem[self.product.index(self.product.star(a, j, u))]

    def ideal(self, x: int) -> int:
        return self.cidl.ideals[x]


def _relabel(cidl: CIdl, prod: RestrictedProduct) -> CIdl:
    """Name each ideal by its maximal tuples outside ``n`` (``n`` itself for the bottom)."""
    poset = prod.semilattice.poset
    labels = []
    for ideal in cidl.ideals:
        live = ideal & ~prod.n_mask
        maxima = [t for t in bits(live) if poset.above[t] & live == 1 << t]
        labels.append("|".join(prod.label(prod.tuples[t]) for t in maxima) or "n")
    f = cidl.frame
    frame = FinFrame(FinPoset(tuple(labels), f.poset.below), f.bottom, f.top, f.meet, f.join)
    return CIdl(cidl.pres, cidl.ideals, frame)


def frame_coproduct(components: Sequence[FinFrame], capacity: int | None = None) -> FrameCoproduct:
    components = tuple(components)
    if not components:
        raise StructureError("coproduct of an empty family is not supported")
    prod = RestrictedProduct(components)
    cap = limits().ideal_base if capacity is None else capacity
    if prod.size > cap:
        raise CapacityError(f"restricted product has {prod.size} tuples; capacity is {cap}")
    pres = FramePresentation(prod.semilattice, coproduct_covers(prod), stable=True)
    if not is_stable(pres):
        raise AssertionError("coproduct covers are not stability-closed")
    cidl = _relabel(enumerate_c_ideals(pres, cap), prod)
    if cidl.ideals[cidl.frame.bottom] != prod.n_mask:
        raise AssertionError("bottom C-ideal differs from n")
    sem = sem_map(pres, cidl)
    injections = []
    for j, f in enumerate(components):
        image = []
        for x in range(f.size):
            t = prod.index(prod.star(x, j, prod.ones))
            ideal = prod.semilattice.poset.below[t] | prod.n_mask
            if cidl.index(ideal) != sem[t]:
                raise AssertionError("injection differs from sem . kappa")
            image.append(sem[t])
        bad = frame_hom_violation(f, cidl.frame, image)
        if bad is not None:
            raise AssertionError(f"injection {j} is not a frame hom ({bad[0]})")
        injections.append(FrameHom(f, cidl.frame, tuple(image)))
    return FrameCoproduct(prod, pres, cidl, sem, tuple(injections))


@dataclass(frozen=True)
class CoproductSpec:
    family: tuple
    plus: FrameCoproduct
    minus: FrameCoproduct
    presentation: PreDFramePresentation
    generated: Generated
    injections: tuple  # DFrameHom per component

    @property
    def dframe(self) -> DFrame:
        return self.generated.dframe

    @cached_property
    def ladder(self) -> LadderData:
        return LadderData.from_generated(self.generated)

    def is_trivial_family(self) -> bool:
        return any(d.plus.is_trivial() or d.minus.is_trivial() for d in self.family)


def dframe_coproduct(family: Sequence[DFrame], capacity: int | None = None) -> CoproductSpec:
    """The d-frame coproduct; all seven axioms and the injections are verified on every build."""
    family = tuple(family)
    plus = frame_coproduct([d.plus for d in family], capacity)
    minus = frame_coproduct([d.minus for d in family], capacity)
    pp, pm = plus.product, minus.product
    con1, tot1 = set(), set()
    for j, d in enumerate(family):
        for rel, out in ((d.con, con1), (d.tot, tot1)):
            for a, b in rel.members:
                out.add((pp.index(pp.star(a, j, pp.ones)), pm.index(pm.star(b, j, pm.ones))))
    pres = PreDFramePresentation(plus.pres, minus.pres, frozenset(con1), frozenset(tot1))
    space = PairSpace(plus.frame, minus.frame)
    gen = Generated(pres, plus.cidl, minus.cidl, plus.sem, minus.sem,
                    DFrame(plus.frame, minus.frame, con_min(_embed(space, plus, minus, con1)),
                           tot_min(_embed(space, plus, minus, tot1))))
    report = check_axioms(gen.dframe)
    if not report.is_dframe:
        raise AssertionError(f"coproduct fails axioms: {report.failures()}")
    injections = []
    for j, d in enumerate(family):
        h = DFrameHom(plus.injections[j], minus.injections[j])
        check = is_dframe_hom(h, d, gen.dframe)
        if not check:
            raise AssertionError(f"injection {j} is not a d-frame hom: {check.witness}")
        injections.append(h)
    return CoproductSpec(family, plus, minus, pres, gen, tuple(injections))


def _embed(space, plus, minus, rel):
    return PairRelation(space, frozenset((plus.sem[a], minus.sem[b]) for a, b in rel))


# --- canonical forms ----------------------------------------------------------

KINDS = ("con_w", "tot_w", "con_v", "tot_v")


@dataclass(frozen=True)
class CanonicalForm:
    kind: str
    pairs: tuple      # per component, a pair in con^i / tot^i
    support: frozenset

    def recombine(self, spec: CoproductSpec) -> tuple:
        return _combine(spec, self.kind, self.pairs)


def _combine(spec: CoproductSpec, kind: str, pairs) -> tuple:
    P, M = spec.plus.frame, spec.minus.frame
    plus = [spec.plus.oplus(a, i) for i, (a, _) in enumerate(pairs)]
    minus = [spec.minus.oplus(b, i) for i, (_, b) in enumerate(pairs)]
    if kind.endswith("_w"):
        return (P.meet_all(plus), M.join_all(minus))
    return (P.join_all(plus), M.meet_all(minus))


def canonical_form(spec: CoproductSpec, alpha: tuple, kind: str) -> CanonicalForm:
    """Per-index strip pairs recombining to ``alpha``, with as small a support as possible.

    ∧-kinds combine by ``(⋀ plus, ⋁ minus)`` and the neutral pair is ``tt``;
    ∨-kinds combine by ``(⋁ plus, ⋀ minus)`` and the neutral pair is ``ff``.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    rel_name = "con" if kind.startswith("con") else "tot"
    wedge = kind.endswith("_w")
    options = []
    for d in spec.family:
        neutral = (d.plus.top, d.minus.bottom) if wedge else (d.plus.bottom, d.minus.top)
        members = sorted(getattr(d, rel_name).members)
        options.append([neutral] + [p for p in members if p != neutral])
    best = None
    for combo in product(*options):
        if _combine(spec, kind, combo) != tuple(alpha):
            continue
        support = frozenset(i for i, (p, d) in enumerate(zip(combo, spec.family))
                            if p != ((d.plus.top, d.minus.bottom) if wedge else (d.plus.bottom, d.minus.top)))
        if best is None or len(support) < len(best.support):
            best = CanonicalForm(kind, tuple(combo), support)
    if best is None:
        raise StructureError(f"{alpha} has no {kind} canonical form", witness=alpha)
    return best


def relation_for_kind(spec: CoproductSpec, kind: str):
    data = spec.ladder
    return {"con_w": data.con_w, "tot_w": data.tot_w, "con_v": data.con_v, "tot_v": data.tot_v}[kind]


# --- strips, rectangles, crosses ---------------------------------------------

@dataclass(frozen=True)
class GeometryTag:
    element: int
    rectangle: tuple | None   # coordinates c with x = ⟦c⟧, or None
    cross: tuple | None       # maximal coordinates d with x = ∪ d^i (+)_i 1, or None
    rect_support: frozenset = frozenset()
    cross_support: frozenset = frozenset()

    @property
    def kind(self) -> str:
        if self.rectangle is not None:
            return "strip" if len(self.rect_support) <= 1 else "rectangle"
        if self.cross is not None:
            return "cross"
        return "other"


def rectangle_coords(fc: FrameCoproduct, x: int):
    """``u`` with ``⟦u⟧ = x`` (outside ``n`` when possible), or None."""
    prod = fc.product
    hits = [t for i, t in enumerate(prod.tuples) if fc.sem[i] == x]
    if not hits:
        return None
    live = [t for t in hits if not prod.in_n(t)]
    if live:
        return live[0]
    # x is n: the strip 0 (+)_0 1 has the smallest support
    return prod.star(prod.components[0].bottom, 0, prod.ones)


def cross_coords(fc: FrameCoproduct, x: int):
    """Maximal ``d`` with every ``d^i (+)_i 1`` inside ``x``; None unless their union is ``x``."""
    ideal = fc.ideal(x)
    coords, union = [], 0
    for i, f in enumerate(fc.product.components):
        best = f.join_all(a for a in range(f.size) if fc.ideal(fc.oplus(a, i)) & ~ideal == 0)
        coords.append(best)
        union |= fc.ideal(fc.oplus(best, i))
    return tuple(coords) if union == ideal else None


def classify_geometry(fc: FrameCoproduct, x: int) -> GeometryTag:
    comps = fc.product.components
    rect = rectangle_coords(fc, x)
    cross = cross_coords(fc, x)
    rs = frozenset(i for i, c in enumerate(rect) if c != comps[i].top) if rect else frozenset()
    cs = frozenset(i for i, d in enumerate(cross) if d != comps[i].bottom) if cross else frozenset()
    return GeometryTag(x, rect, cross, rs, cs)


def rec_cross_check(fc: FrameCoproduct, gamma: int, delta: int,
                    gamma_coords=None, delta_coords=None):
    """First ``i`` in ``I(gamma)`` with ``gamma^i <= delta^i``, or None if there is none.

    Coordinates default to the canonical ones; explicit ones are validated.
    """
    F = fc.frame
    if not F.leq(gamma, delta):
        raise PreconditionError("rectangle is not below the cross", witness=(gamma, delta))
    comps = fc.product.components
    c = tuple(gamma_coords) if gamma_coords is not None else rectangle_coords(fc, gamma)
    if c is None or fc.sem[fc.product.index(c)] != gamma:
        raise PreconditionError("not a rectangle with these coordinates", witness=gamma)
    d = tuple(delta_coords) if delta_coords is not None else cross_coords(fc, delta)
    if d is None or F.join_all(fc.oplus(x, i) for i, x in enumerate(d)) != delta:
        raise PreconditionError("not a cross with these coordinates", witness=delta)
    for i, f in enumerate(comps):
        if c[i] != f.top and f.leq(c[i], d[i]):
            return i
    return None


@dataclass(frozen=True)
class RecCrossSweep:
    checked: int
    failures: tuple
    top_pairs: int  # pairs with gamma = top, where I(gamma) is empty


def rec_cross_sweep(fc: FrameCoproduct) -> RecCrossSweep:
    """Every (rectangle, cross) pair with ``gamma <= delta`` and ``gamma`` below top."""
    F = fc.frame
    tags = [classify_geometry(fc, x) for x in range(F.size)]
    rects = [t.element for t in tags if t.rectangle is not None]
    crosses = [t.element for t in tags if t.cross is not None]
    checked, failures, tops = 0, [], 0
    for g in rects:
        for d in crosses:
            if not F.leq(g, d):
                continue
            if g == F.top:
                tops += 1
                continue
            checked += 1
            if rec_cross_check(fc, g, d) is None:
                failures.append((g, d))
    return RecCrossSweep(checked, tuple(failures), tops)


@dataclass(frozen=True)
class StripReport:
    index: int
    applicable: bool
    injective: bool = False
    con_ok: bool = False
    tot_ok: bool = False

    @property
    def ok(self) -> bool:
        return self.applicable and self.injective and self.con_ok and self.tot_ok


def strips_iso_check(spec: CoproductSpec, i: int) -> StripReport:
    """Whether ``iota^i`` maps ``L^i`` isomorphically onto the ``i``-strips with ``con1``/``tot1`` restricted."""
    if spec.is_trivial_family():
        return StripReport(i, False)
    d = spec.family[i]
    h = spec.injections[i]
    injective = (len(set(h.plus.map)) == d.plus.size and len(set(h.minus.map)) == d.minus.size)
    con1, tot1 = spec.generated.con1.members, spec.generated.tot1.members
    con_ok = all(((a, b) in d.con.members) == (h((a, b)) in con1)
                 for a in range(d.plus.size) for b in range(d.minus.size))
    tot_ok = all(((a, b) in d.tot.members) == (h((a, b)) in tot1)
                 for a in range(d.plus.size) for b in range(d.minus.size))
    return StripReport(i, True, injective, con_ok, tot_ok)


@dataclass(frozen=True)
class BasicsReport:
    order_reflect: bool   # u not in n: ⟦u⟧ <= ⟦v⟧ iff u <= v
    injective: bool       # on B \ n
    meets: bool           # (a (+)_j u) ∧ (b (+)_j u) = (a ∧ b) (+)_j u
    joins: bool           # V_k (a_k (+)_j u) = (V a_k) (+)_j u
    n_tally: int          # tuples in n, all sent to the bottom
    counts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.order_reflect and self.injective and self.meets and self.joins


def copr_basics_suite(fc: FrameCoproduct) -> BasicsReport:
    prod, F, sem = fc.product, fc.frame, fc.sem
    ts = prod.tuples
    live = [i for i, t in enumerate(ts) if not prod.in_n(t)]
    order = all(F.leq(sem[i], sem[k]) == prod.leq(ts[i], ts[k]) for i in live for k in range(len(ts)))
    injective = len({sem[i] for i in live}) == len(live)
    n_tally = sum(1 for i, t in enumerate(ts) if prod.in_n(t) and sem[i] == F.bottom)
    meets = joins = True
    n_meets = n_joins = 0
    for j, f in enumerate(prod.components):
        for u in ts:
            for a in range(f.size):
                for b in range(f.size):
                    n_meets += 1
                    if F.meet[fc.oplus(a, j, u)][fc.oplus(b, j, u)] != fc.oplus(f.meet[a][b], j, u):
                        meets = False
            for kmask in range(1 << f.size):
                n_joins += 1
                K = list(bits(kmask))
                if F.join_all(fc.oplus(a, j, u) for a in K) != fc.oplus(f.join_all(K), j, u):
                    joins = False
    return BasicsReport(order, injective, meets, joins, n_tally,
                        {"order": len(live) * len(ts), "meets": n_meets, "joins": n_joins})


@dataclass(frozen=True)
class CoproductCertificate:
    sizes: tuple
    axioms_ok: bool
    mu: tuple
    indep: tuple
    strips: tuple
    rec_cross: tuple
    basics: tuple

    @property
    def ok(self) -> bool:
        return (self.axioms_ok and all(self.mu) and all(self.indep)
                and all(s.ok or not s.applicable for s in self.strips)
                and all(not r.failures for r in self.rec_cross) and all(b.ok for b in self.basics))


def certify(spec: CoproductSpec) -> CoproductCertificate:
    data = spec.ladder
    return CoproductCertificate(
        sizes=(spec.plus.frame.size, spec.minus.frame.size),
        axioms_ok=check_axioms(spec.dframe).is_dframe,
        mu=(check_mu(data, "+").holds, check_mu(data, "-").holds),
        indep=(check_indep(data, "+").holds, check_indep(data, "-").holds),
        strips=tuple(strips_iso_check(spec, i) for i in range(len(spec.family))),
        rec_cross=(rec_cross_sweep(spec.plus), rec_cross_sweep(spec.minus)),
        basics=(copr_basics_suite(spec.plus), copr_basics_suite(spec.minus)),
    )


# --- universal property ------------------------------------------------------

def _tuple_map(fc: FrameCoproduct, legs: Sequence[FrameHom], target: FinFrame) -> tuple:
    """``lambda(u) = ⋀_j lambda^j(u_j)`` on the restricted product."""
    return tuple(target.meet_all(h.map[x] for h, x in zip(legs, t)) for t in fc.product.tuples)


def _cover_chain_ok(fc: FrameCoproduct, lam: tuple, legs, target: FinFrame) -> bool:
    prod = fc.product
    ones = prod.ones
    for j, u, K in cover_shapes(prod):
        f = prod.components[j]
        side_u = lam[prod.index(prod.star(f.top, j, u))]
        lhs = target.join_all(lam[prod.index(prod.star(a, j, u))] for a in K)
        step1 = target.join_all(target.meet[lam[prod.index(prod.star(a, j, ones))]][side_u] for a in K)
        step2 = target.meet[target.join_all(lam[prod.index(prod.star(a, j, ones))] for a in K)][side_u]
        step3 = target.meet[lam[prod.index(prod.star(f.join_all(K), j, ones))]][side_u]
        rhs = lam[prod.index(prod.star(f.join_all(K), j, u))]
        if not lhs == step1 == step2 == step3 == rhs:
            return False
    return True


def coproduct_universal_check(spec: CoproductSpec, M: DFrame, cocone: Sequence[DFrameHom],
                              check_unique: bool = True) -> DFrameHom:
    """The mediating hom for a cocone ``lambda^j : L^j -> M``; unique and factoring through the injections."""
    cocone = tuple(cocone)
    if len(cocone) != len(spec.family):
        raise PreconditionError("cocone has the wrong number of legs")
    for j, (d, h) in enumerate(zip(spec.family, cocone)):
        check = is_dframe_hom(h, d, M)
        if not check:
            raise PreconditionError(f"cocone leg {j} is not a d-frame hom", witness=(j, check.witness))
    lam_p = _tuple_map(spec.plus, [h.plus for h in cocone], M.plus)
    lam_m = _tuple_map(spec.minus, [h.minus for h in cocone], M.minus)
    if not (_cover_chain_ok(spec.plus, lam_p, cocone, M.plus)
            and _cover_chain_ok(spec.minus, lam_m, cocone, M.minus)):
        raise AssertionError("cover-preservation chain fails")
    bar = verify_dfrm_universal(spec.generated, M, lam_p, lam_m, check_unique=check_unique)
    for j, (iota, leg) in enumerate(zip(spec.injections, cocone)):
        if iota.compose(bar).plus.map != leg.plus.map or iota.compose(bar).minus.map != leg.minus.map:
            raise AssertionError(f"mediating hom does not factor leg {j}")
    if check_unique:
        factoring = [h for h in enumerate_dframe_homs(spec.dframe, M)
                     if all(iota.compose(h).plus.map == leg.plus.map
                            and iota.compose(h).minus.map == leg.minus.map
                            for iota, leg in zip(spec.injections, cocone))]
        if factoring != [bar]:
            raise AssertionError(f"{len(factoring)} d-frame homs factor the cocone; expected one")
    return bar
