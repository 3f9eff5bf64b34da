"""Sufficient conditions for (con-tot) on generated pre-d-frames.

All relations are materialised up front in :class:`LadderData` so every
quantifier ranges over a concrete finite set and every failure comes with
a concrete witness. Condition ids are ASCII: ``lambda0+`` ... ``lambda4-``,
``alpha+``, ``alpha-``, ``mu+``, ``mu-``, ``ind+``, ``ind-``, ``indep+``,
``indep-`` and ``R-ind``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .closure import (
    Generated, GeneratorSet, big_join_close, con_min, d_bar, d_one_step, down_close, tot_min,
    up_close, wedge_vee_close, with_tt_ff,
)
from .dframe import PairRelation, PairSpace, check_axioms, contot_violation
from .errors import PreconditionError
from .lattice import bits


@dataclass(frozen=True)
class ConditionReport:
    id: str
    holds: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class LadderData:
    """The embedded generating relations of a presentation and every closure the ladder mentions."""

    space: PairSpace
    con1: PairRelation
    tot1: PairRelation
    gens: GeneratorSet

    @classmethod
    def from_generated(cls, gen: Generated) -> "LadderData":
        return cls(gen.space, gen.con1, gen.tot1, gen.gens)

    @cached_property
    def con_w(self):
        return wedge_vee_close(with_tt_ff(self.con1), "wedge")

    @cached_property
    def con_v(self):
        return wedge_vee_close(with_tt_ff(self.con1), "vee")

    @cached_property
    def con_wv(self):
        return wedge_vee_close(with_tt_ff(self.con1))

    @cached_property
    def tot_w(self):
        return wedge_vee_close(with_tt_ff(self.tot1), "wedge")

    @cached_property
    def tot_v(self):
        return wedge_vee_close(with_tt_ff(self.tot1), "vee")

    @cached_property
    def tot_wv(self):
        return wedge_vee_close(with_tt_ff(self.tot1))

    @cached_property
    def down_con_wv(self):
        return down_close(self.con_wv)

    @cached_property
    def s_con(self):
        """``D(↓con_∧∨)``."""
        return d_one_step(self.down_con_wv)

    @cached_property
    def up_tot_wv(self):
        return up_close(self.tot_wv)

    @cached_property
    def con_w_join(self):
        """``con_{∧,⋁}``."""
        return big_join_close(self.con_w, "join")

    @cached_property
    def con_v_meet(self):
        """``con_{∨,⋀}``."""
        return big_join_close(self.con_v, "meet")

    @cached_property
    def con_wv_join(self):
        return big_join_close(self.con_wv, "join")

    @cached_property
    def con_wv_meet(self):
        return big_join_close(self.con_wv, "meet")

    @cached_property
    def down_con_w_join(self):
        return down_close(self.con_w_join)

    @cached_property
    def down_con_v_meet(self):
        return down_close(self.con_v_meet)

    @cached_property
    def down_con_v(self):
        return down_close(self.con_v)

    @cached_property
    def down_con_w(self):
        return down_close(self.con_w)

    @cached_property
    def CON(self):
        return con_min(self.con1)

    @cached_property
    def TOT(self):
        return tot_min(self.tot1)


# --- implication-shaped conditions ------------------------------------------
# (alpha relation, beta relation, premise) per condition; premise "eq" is
# alpha_s = beta_s and "leq" is beta_s <= alpha_s on the shared side s.

_IMPLICATIONS = {
    "lambda0+": ("s_con", "up_tot_wv", "eq"),
    "lambda0-": ("s_con", "up_tot_wv", "eq"),
    "lambda1+": ("s_con", "tot_wv", "leq"),
    "lambda1-": ("s_con", "tot_wv", "leq"),
    "lambda2+": ("s_con", "tot_w", "leq"),
    "lambda2-": ("s_con", "tot_v", "leq"),
    "lambda3+": ("con_wv_join", "tot_w", "leq"),
    "lambda3-": ("con_wv_meet", "tot_v", "leq"),
    "lambda4+": ("con_w_join", "tot_w", "leq"),
    "lambda4-": ("con_v_meet", "tot_v", "leq"),
    "mu+": ("con_v", "tot_w", "leq"),
    "mu-": ("con_w", "tot_v", "leq"),
}

# (left factor, right factor, relation intersected, required superset) for inclusions
# (X x Y) ∩ rel ⊆ sup, with X, Y each "B" (generators) or "L" (whole carrier)
_INCLUSIONS = {
    "ind+": ("B", "B", "down_con_w_join", "down_con_wv"),
    "ind-": ("B", "B", "down_con_v_meet", "down_con_wv"),
    "indep+": ("L", "B", "down_con_w_join", "down_con_v"),
    "indep-": ("B", "L", "down_con_v_meet", "down_con_w"),
}

CONDITION_IDS = tuple(
    [f"lambda{k}{s}" for k in range(5) for s in "+-"]
    + ["alpha+", "alpha-", "mu+", "mu-", "ind+", "ind-", "R-ind", "indep+", "indep-"]
)


def _violates(space: PairSpace, kind: str, sign: str, a, b) -> bool:
    if sign == "+":
        P, M = space.plus, space.minus
        premise = a[0] == b[0] if kind == "eq" else P.leq(b[0], a[0])
        return premise and not M.leq(a[1], b[1])
    P, M = space.minus, space.plus
    premise = a[1] == b[1] if kind == "eq" else P.leq(b[1], a[1])
    return premise and not M.leq(a[0], b[0])


def _implication(data: LadderData, cid: str) -> ConditionReport:
    arel, brel, kind = _IMPLICATIONS[cid]
    sign = cid[-1]
    alphas, betas = sorted(getattr(data, arel).members), sorted(getattr(data, brel).members)
    for a in alphas:
        for b in betas:
            if _violates(data.space, kind, sign, a, b):
                return ConditionReport(cid, False, (a, b))
    return ConditionReport(cid, True)


def _factor(data: LadderData, which: str, side: str) -> int:
    frame = data.space.plus if side == "+" else data.space.minus
    if which == "L":
        return frame.full
    return data.gens.plus if side == "+" else data.gens.minus


def _inclusion(data: LadderData, cid: str) -> ConditionReport:
    left, right, rel, sup = _INCLUSIONS[cid]
    lmask, rmask = _factor(data, left, "+"), _factor(data, right, "-")
    sup_members = getattr(data, sup).members
    for g in sorted(getattr(data, rel).members):
        if lmask >> g[0] & 1 and rmask >> g[1] & 1 and g not in sup_members:
            return ConditionReport(cid, False, (g,))
    return ConditionReport(cid, True)


def check_lambda(data: LadderData, stage: int, side: str) -> ConditionReport:
    if stage not in range(5) or side not in "+-" or len(side) != 1:
        raise ValueError("stage must be 0..4 and side '+' or '-'")
    return _implication(data, f"lambda{stage}{side}")


def check_mu(data: LadderData, side: str) -> ConditionReport:
    return _implication(data, f"mu{side}")


def check_indep(data: LadderData, side: str) -> ConditionReport:
    return _inclusion(data, f"indep{side}")


def _nonempty_family_joins(frame, values) -> dict:
    """``join -> one nonempty family`` realising it, over all nonempty subsets of ``values``."""
    acc: dict = {}
    for v in sorted(values):
        new = {frame.join[j][v]: fam + (v,) for j, fam in acc.items()}
        acc.setdefault(v, (v,))
        for j, fam in new.items():
            acc.setdefault(j, fam)
    return acc


def check_alpha_aux(data: LadderData, side: str) -> ConditionReport:
    """Families sharing one coordinate inside ``↓con_∧∨`` against ``tot_∧`` (``tot_∨`` for the minus side)."""
    space = data.space
    cid = f"alpha{side}"
    rel = data.down_con_wv.members
    if side == "+":
        fixed_frame, free_frame, betas = space.minus, space.plus, sorted(data.tot_w.members)
        shared, free = 1, 0
    else:
        fixed_frame, free_frame, betas = space.plus, space.minus, sorted(data.tot_v.members)
        shared, free = 0, 1
    for y in range(fixed_frame.size):
        xs = [p[free] for p in rel if p[shared] == y]
        for j, fam in sorted(_nonempty_family_joins(free_frame, xs).items()):
            for b in betas:
                if free_frame.leq(b[free], j) and not fixed_frame.leq(y, b[shared]):
                    pairs = tuple((x, y) if side == "+" else (y, x) for x in fam)
                    return ConditionReport(cid, False, (pairs, b))
    return ConditionReport(cid, True)


def _require_closed(R: PairRelation):
    if down_close(R).members != R.members:
        raise PreconditionError("relation is not downward closed", witness=R)
    if wedge_vee_close(R).members != R.members:
        raise PreconditionError("relation is not closed under logical meets and joins", witness=R)


def check_r_ind(R: PairRelation, gens: GeneratorSet) -> ConditionReport:
    """Compact form ``(B+ x B-) ∩ D̄(R) ⊆ R``, cross-checked against the per-pair form."""
    _require_closed(R)
    space = R.space
    db = sorted(d_bar(R, gens).members)
    compact = next((g for g in db if gens.plus >> g[0] & 1 and gens.minus >> g[1] & 1
                    and g not in R.members), None)
    original = None
    for a in db:
        bp = space.plus.below_mask(a[0]) & gens.plus
        bm = space.minus.below_mask(a[1]) & gens.minus
        bad = next(((x, y) for x in bits(bp) for y in bits(bm) if (x, y) not in R.members), None)
        if bad is not None:
            original = (a, bad)
            break
    if (compact is None) != (original is None):
        raise AssertionError(f"compact and per-pair independence disagree: {compact} vs {original}")
    return ConditionReport("R-ind", compact is None, None if compact is None else (compact,))


def check_indep_split(data: LadderData, side: str) -> ConditionReport:
    """One half of the split independence condition; the conjunction must match ``R-ind`` for ``↓con_∧∨``."""
    plus, minus = _inclusion(data, "ind+"), _inclusion(data, "ind-")
    whole = check_r_ind(data.down_con_wv, data.gens)
    if (plus.holds and minus.holds) != whole.holds:
        raise AssertionError("split independence disagrees with R-ind on ↓con_∧∨")
    return plus if side == "+" else minus


def evaluate_all(data: LadderData) -> dict:
    """Every condition by id, in :data:`CONDITION_IDS` order."""
    out = {}
    for cid in CONDITION_IDS:
        if cid in _IMPLICATIONS:
            out[cid] = _implication(data, cid)
        elif cid in _INCLUSIONS:
            split = cid in ("ind+", "ind-")
            out[cid] = check_indep_split(data, cid[-1]) if split else _inclusion(data, cid)
        elif cid.startswith("alpha"):
            out[cid] = check_alpha_aux(data, cid[-1])
        else:
            out[cid] = check_r_ind(data.down_con_wv, data.gens)
    return out


def recheck(data: LadderData, report: ConditionReport) -> bool:
    """Re-evaluate a failure witness independently; True iff it is a genuine violation."""
    if report.holds:
        return report.witness is None
    cid, w = report.id, report.witness
    space = data.space
    if cid in _IMPLICATIONS:
        arel, brel, kind = _IMPLICATIONS[cid]
        a, b = w
        return (a in getattr(data, arel) and b in getattr(data, brel)
                and _violates(space, kind, cid[-1], a, b))
    if cid in _INCLUSIONS:
        left, right, rel, sup = _INCLUSIONS[cid]
        (g,) = w
        return (_factor(data, left, "+") >> g[0] & 1 and _factor(data, right, "-") >> g[1] & 1
                and g in getattr(data, rel) and g not in getattr(data, sup))
    if cid.startswith("alpha"):
        fam, b = w
        rel = data.down_con_wv
        if cid == "alpha+":
            y = fam[0][1]
            j = space.plus.join_all(x for x, _ in fam)
            return (all(p in rel and p[1] == y for p in fam) and b in data.tot_w
                    and space.plus.leq(b[0], j) and not space.minus.leq(y, b[1]))
        x = fam[0][0]
        j = space.minus.join_all(y for _, y in fam)
        return (all(p in rel and p[0] == x for p in fam) and b in data.tot_v
                and space.minus.leq(b[1], j) and not space.plus.leq(x, b[0]))
    if cid == "R-ind":
        (g,) = w
        return (data.gens.plus >> g[0] & 1 and data.gens.minus >> g[1] & 1
                and g in d_bar(data.down_con_wv, data.gens) and g not in data.down_con_wv)
    raise KeyError(cid)


# --- gates and stage implications -------------------------------------------

@dataclass(frozen=True)
class GateVerdict:
    lambda_bundle: bool   # lambda4± and ind±
    simple_bundle: bool   # mu± and indep±
    contot: bool          # ground truth on the generated structure
    witness: tuple | None = None

    @property
    def violations(self) -> list:
        """Bundles that hold while (con-tot) fails; must always be empty."""
        out = []
        if self.lambda_bundle and not self.contot:
            out.append("lambda4+ind")
        if self.simple_bundle and not self.contot:
            out.append("mu+indep")
        return out

    @property
    def separations(self) -> list:
        """Bundles that fail although (con-tot) holds: the conditions are sufficient, not necessary."""
        out = []
        if self.contot and not self.lambda_bundle:
            out.append("lambda4+ind")
        if self.contot and not self.simple_bundle:
            out.append("mu+indep")
        return out


def theorem_contot_gate(data: LadderData, reports: dict | None = None,
                        strict: bool = True) -> GateVerdict:
    reports = reports or evaluate_all(data)
    lam = all(reports[c].holds for c in ("lambda4+", "lambda4-", "ind+", "ind-"))
    simple = all(reports[c].holds for c in ("mu+", "mu-", "indep+", "indep-"))
    wit = contot_violation(data.space, data.CON.members, data.TOT.members)
    verdict = GateVerdict(lam, simple, wit is None, wit)
    if strict and verdict.violations:
        raise AssertionError(f"sufficient condition holds but (con-tot) fails at {wit}")
    return verdict


# (name, antecedent, consequent, asserted); ids without a sign are instantiated per side
_STAGE_RULES = (
    ("1=>0", "lambda1", "lambda0", True),
    ("0=>1", "lambda0", "lambda1", True),
    ("2=>1", "lambda2", "lambda1", True),
    ("1=>2", "lambda1", "lambda2", True),
    ("3=>2", "lambda3", "lambda2", True),
    ("4=>3", "lambda4", "lambda3", True),
    ("3=>4", "lambda3", "lambda4", True),
    ("4=>1", "lambda4", "lambda1", True),
    ("1=>4", "lambda1", "lambda4", True),
    ("alpha=>2", "alpha", "lambda2", True),
    ("3=>alpha", "lambda3", "alpha", True),
    ("indep=>ind", "indep", "ind", True),
    ("2=>3", "lambda2", "lambda3", False),
)


@dataclass(frozen=True)
class StageReport:
    values: dict
    violations: tuple = ()
    observed: dict = field(default_factory=dict)  # unasserted rule -> (antecedent held, consequent held)

    @property
    def ok(self) -> bool:
        return not self.violations


def stage_implication_suite(data: LadderData, reports: dict | None = None) -> StageReport:
    reports = reports or evaluate_all(data)
    values = {cid: r.holds for cid, r in reports.items()}
    violations, observed = [], {}
    for name, lhs, rhs, asserted in _STAGE_RULES:
        for s in "+-":
            a, c = values[lhs + s], values[rhs + s]
            if asserted and a and not c:
                violations.append(f"{name}{s}")
            if not asserted:
                observed[f"{name}{s}"] = (a, c)
    # lambda0 is the (con-tot) axiom restated, so it must match the ground truth
    truth = contot_violation(data.space, data.CON.members, data.TOT.members) is None
    if (values["lambda0+"] and values["lambda0-"]) != truth:
        violations.append("lambda0<=>con-tot")
    return StageReport(values, tuple(violations), observed)


def generated_axioms_ok(gen: Generated) -> bool:
    """The generated structure is always a pre-d-frame."""
    return check_axioms(gen.dframe).is_pre_dframe
