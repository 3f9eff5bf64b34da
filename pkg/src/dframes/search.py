"""Counterexample search over small pre-d-frame presentations.

Every instance is generated, run through the condition ladder, and checked
for (a) violated implications, which must never occur, and (b) findings:
instances where a sufficient condition fails although (con-tot) holds, or
where an unasserted stage implication fails.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .closure import PreDFramePresentation, corollary_check, generate_pre_dframe
from .conditions import LadderData, evaluate_all, recheck, stage_implication_suite, theorem_contot_gate
from .dframe import check_axioms
from .errors import CapacityError, StructureError, limits
from .lattice import FinPoset, bits, mask_of
from .presentation import Cover, FramePresentation, MeetSemilattice, stability_close

MODES = ("exhaustive", "random")


@dataclass(frozen=True)
class SearchConfig:
    max_b: int = 2
    max_rel: int = 2
    mode: str = "exhaustive"
    samples: int = 200
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        for name in ("max_b", "max_rel", "samples", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        guard = limits().exhaustive_base
        if self.mode == "exhaustive" and self.max_b > guard:
            raise CapacityError(f"exhaustive search needs max_b <= {guard} (got {self.max_b})")


# --- instance sources ----------------------------------------------------------

def _canonical(n: int, below: tuple) -> tuple:
    """Lexicographically least relabelled order matrix, for deduplication up to isomorphism."""
    best = None
    for perm in itertools.permutations(range(n)):
        inv = {p: i for i, p in enumerate(perm)}
        key = tuple(mask_of(inv[j] for j in bits(below[perm[i]])) for i in range(n))
        best = key if best is None or key < best else best
    return best


def meet_semilattices(max_size: int) -> list:
    """Finite meet-semilattices with top, up to isomorphism, of sizes ``1..max_size``."""
    out = []
    for n in range(1, max_size + 1):
        seen = set()
        strict = [(a, b) for a in range(n) for b in range(n) if a != b]
        for k in range(len(strict) + 1):
            for rel in itertools.combinations(strict, k):
                try:
                    poset = FinPoset.from_relation([str(i) for i in range(n)], rel)
                except StructureError:
                    continue
                if len(rel) != sum(bin(m).count("1") - 1 for m in poset.below):
                    continue  # only transitively closed relations, each order exactly once
                key = _canonical(n, poset.below)
                if key in seen:
                    continue
                seen.add(key)
                try:
                    out.append(_relabel_by_height(MeetSemilattice.from_poset(poset)))
                except StructureError:
                    continue
    return out


def _relabel_by_height(s: MeetSemilattice) -> MeetSemilattice:
    """Relabel so the order is a linear extension with labels ``0..n-1``."""
    order = s.poset.linear_extension()
    pos = {old: new for new, old in enumerate(order)}
    pairs = [(pos[a], pos[b]) for a in range(s.size) for b in bits(s.poset.above[a]) if a != b]
    return MeetSemilattice.from_poset(FinPoset.from_relation([str(i) for i in range(s.size)], pairs))


def nontrivial_covers(base: MeetSemilattice) -> list:
    """Covers ``U ⊣ a`` with ``U ⊆ ↓a`` and ``a ∉ U``."""
    out = []
    for a in range(base.size):
        below = base.poset.below[a] & ~(1 << a)
        for k in range(below.bit_count() + 1):
            for us in itertools.combinations(bits(below), k):
                out.append(Cover(a, frozenset(us)))
    return out


def presentations(base: MeetSemilattice) -> list:
    """Every stable presentation over ``base``, deduplicated by its closed cover set."""
    seen, out = set(), []
    cand = nontrivial_covers(base)
    for k in range(len(cand) + 1):
        for covers in itertools.combinations(cand, k):
            pres = stability_close(FramePresentation(base, covers))
            if pres.covers not in seen:
                seen.add(pres.covers)
                out.append(pres)
    return out


def _relations(np_: int, nm: int, max_rel: int):
    cells = [(a, b) for a in range(np_) for b in range(nm)]
    for k in range(min(max_rel, len(cells)) + 1):
        yield from itertools.combinations(cells, k)


def exhaustive_instances(max_b: int, max_rel: int):
    catalogue = [p for s in meet_semilattices(max_b) for p in presentations(s)]
    for pp, pm in itertools.product(catalogue, repeat=2):
        for con in _relations(pp.base.size, pm.base.size, max_rel):
            for tot in _relations(pp.base.size, pm.base.size, max_rel):
                yield PreDFramePresentation(pp, pm, frozenset(con), frozenset(tot))


def _set_label(mask: int) -> str:
    return "{" + ",".join(str(i) for i in bits(mask)) + "}"


def random_semilattice(rng: random.Random, max_size: int) -> tuple:
    """A random meet-subsemilattice of a small powerset that contains the full set.

    Returns the semilattice (labelled by its sets) together with the sets.
    """
    while True:
        n = rng.randint(1, 3)
        full = (1 << n) - 1
        family = {full} | {rng.randrange(full + 1) for _ in range(rng.randint(0, max_size))}
        changed = True
        while changed:
            changed = False
            for a, b in itertools.combinations(list(family), 2):
                if a & b not in family:
                    family.add(a & b)
                    changed = True
        if len(family) <= max_size:
            sets = sorted(family, key=lambda m: (m.bit_count(), m))
            pairs = [(i, j) for i, a in enumerate(sets) for j, b in enumerate(sets) if i != j and a & ~b == 0]
            poset = FinPoset.from_relation([_set_label(m) for m in sets], pairs)
            return MeetSemilattice.from_poset(poset), sets


def random_presentation(rng: random.Random, max_size: int) -> FramePresentation:
    """Covers are unions that really hold among the chosen sets."""
    base, sets = random_semilattice(rng, max_size)
    covers = []
    for _ in range(rng.randint(0, 2)):
        a = rng.randrange(base.size)
        below = [u for u in bits(base.poset.below[a]) if u != a]
        us = [u for u in below if rng.random() < 0.5]
        if _union(sets, us) == sets[a]:
            covers.append(Cover(a, frozenset(us)))
    return stability_close(FramePresentation(base, covers))


def _union(sets, idx) -> int:
    out = 0
    for i in idx:
        out |= sets[i]
    return out


def random_instances(config: SearchConfig):
    rng = random.Random(config.seed)
    for _ in range(config.samples):
        pp = random_presentation(rng, config.max_b)
        pm = random_presentation(rng, config.max_b)
        cells = [(a, b) for a in range(pp.base.size) for b in range(pm.base.size)]
        con = rng.sample(cells, rng.randint(0, min(config.max_rel, len(cells))))
        tot = rng.sample(cells, rng.randint(0, min(config.max_rel, len(cells))))
        yield PreDFramePresentation(pp, pm, frozenset(con), frozenset(tot))


# --- evaluation ----------------------------------------------------------------

def describe_presentation(p: FramePresentation) -> str:
    labs = p.base.labels
    order = " ".join(f"{labs[a]}<{labs[b]}" for a, b in p.base.poset.hasse_edges())
    covers = "; ".join(p.describe_cover(c) for c in p.covers if c.covered not in c.coverers)
    return f"[{' '.join(labs)} | {order} | {covers}]"


def describe(inst: PreDFramePresentation) -> str:
    pl, ml = inst.pres_plus.base.labels, inst.pres_minus.base.labels

    def rel(r):
        return "{" + " ".join(f"({pl[a]},{ml[b]})" for a, b in sorted(r)) + "}"

    return (f"B+={describe_presentation(inst.pres_plus)} B-={describe_presentation(inst.pres_minus)} "
            f"con1={rel(inst.con1)} tot1={rel(inst.tot1)}")


@dataclass(frozen=True)
class InstanceResult:
    key: str
    sizes: tuple
    violations: tuple = ()
    findings: tuple = ()


def evaluate_instance(inst: PreDFramePresentation) -> InstanceResult:
    gen = generate_pre_dframe(inst)
    data = LadderData.from_generated(gen)
    reports = evaluate_all(data)
    violations = []
    if not check_axioms(gen.dframe).is_pre_dframe:
        violations.append("pre-d-frame axioms")
    stages = stage_implication_suite(data, reports)
    violations += [f"stage {v}" for v in stages.violations]
    gate = theorem_contot_gate(data, reports, strict=False)
    violations += [f"gate {v}" for v in gate.violations]
    if not corollary_check(data.con1, data.tot1).ok:
        violations.append("corollary formulas")
    violations += [f"recheck {cid}" for cid, r in reports.items() if not recheck(data, r)]
    findings = [f"separation {s}" for s in gate.separations]
    findings += [f"stage {name} fails" for name, (a, c) in sorted(stages.observed.items()) if a and not c]
    sizes = (gen.dframe.plus.size, gen.dframe.minus.size)
    return InstanceResult(describe(inst), sizes, tuple(violations), tuple(findings))


@dataclass(frozen=True)
class SearchResult:
    config: SearchConfig
    checked: int
    violations: tuple = ()   # (instance key, labels)
    findings: tuple = ()
    tally: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def render(self) -> str:
        c = self.config
        lines = [f"mode={c.mode} max_b={c.max_b} max_rel={c.max_rel} seed={c.seed} samples={c.samples}",
                 f"instances {self.checked}",
                 f"violations {len(self.violations)}",
                 f"findings {len(self.findings)}"]
        lines += [f"  {k} {v}" for k, v in sorted(self.tally.items())]
        lines += [f"VIOLATION {key} :: {', '.join(labels)}" for key, labels in self.violations]
        lines += [f"FINDING {key} :: {', '.join(labels)}" for key, labels in self.findings]
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        return {"config": self.config.__dict__, "checked": self.checked, "ok": self.ok,
                "violations": [list(v) for v in self.violations],
                "findings": [list(f) for f in self.findings], "tally": dict(sorted(self.tally.items()))}


def run_search(config: SearchConfig) -> SearchResult:
    if config.mode == "exhaustive":
        instances = list(exhaustive_instances(config.max_b, config.max_rel))
    else:
        instances = list(random_instances(config))
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            results = list(pool.map(evaluate_instance, instances, chunksize=64))
    else:
        results = [evaluate_instance(i) for i in instances]
    tally: dict = {}
    for r in results:
        for f in r.findings:
            tally[f] = tally.get(f, 0) + 1
    violations = sorted((r.key, r.violations) for r in results if r.violations)
    findings = sorted((r.key, r.findings) for r in results if r.findings)
    return SearchResult(config, len(results), tuple(violations), tuple(findings), tally)
