"""``dfrm`` command line: validate, gen, check, coproduct and search.

Exit status: 0 success, 1 mathematical failure (witness printed), 2 input
error, 3 capacity guard.
"""

from __future__ import annotations

import argparse
import json
import sys

from .closure import PreDFramePresentation, generate_pre_dframe
from .conditions import LadderData, evaluate_all, stage_implication_suite, theorem_contot_gate
from .coproduct import certify, dframe_coproduct
from .dframe import DFrame, FinBispace, check_axioms, omega_d
from .errors import CapacityError, DFrameError, ParseError
from .search import SearchConfig, run_search
from .textio import dumps, parse

OK, FAIL, INPUT, CAPACITY = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse(fh.read())
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except ParseError as exc:
        raise InputError(f"{path}:{exc}") from None


def _lookup(doc, name: str, kinds: tuple):
    if name not in doc:
        raise InputError(f"no declaration named {name!r}")
    decl = doc.decls[name]
    if decl.kind not in kinds:
        raise InputError(f"{name!r} is a {decl.kind}, expected {' or '.join(kinds)}")
    return decl.value


def _as_dframe(value) -> DFrame:
    return omega_d(value) if isinstance(value, FinBispace) else value


def _pair_label(d: DFrame, p) -> str:
    return f"({d.plus.labels[p[0]]},{d.minus.labels[p[1]]})"


def _is_pair(p) -> bool:
    return isinstance(p, tuple) and len(p) == 2 and all(isinstance(c, int) for c in p)


def _witness_text(d: DFrame, w, nested: bool = False) -> str:
    """Pairs are printed with element labels; nested families in brackets."""
    if w is None:
        return "-"
    if _is_pair(w):
        return _pair_label(d, w)
    if isinstance(w, tuple):
        body = " ".join(_witness_text(d, x, True) for x in w)
        return f"[{body}]" if nested else body
    return str(w)


def _axiom_lines(d: DFrame) -> tuple:
    report = check_axioms(d)
    lines = [f"  {r.axiom:<14} {'pass' if r.holds else 'FAIL'} {_witness_text(d, r.witness) if not r.holds else ''}".rstrip()
             for r in report.results]
    return report, lines


def cmd_validate(args) -> tuple:
    doc = _load(args.file)
    out, data, status = [], {}, OK
    for name, decl in doc.decls.items():
        if decl.kind in ("dframe", "bispace"):
            d = _as_dframe(decl.value)
            report, lines = _axiom_lines(d)
            verdict = "d-frame" if report.is_dframe else "pre-d-frame" if report.is_pre_dframe else "not a pre-d-frame"
            out.append(f"{decl.kind} {name}: {verdict} ({d.plus.size}x{d.minus.size})")
            out += lines
            data[name] = {"kind": decl.kind, "verdict": verdict,
                          "axioms": {r.axiom: r.holds for r in report.results}}
            if decl.kind == "dframe" and not report.is_dframe:
                status = FAIL
        else:
            size = decl.value.size if hasattr(decl.value, "size") else None
            out.append(f"{decl.kind} {name}: ok" + (f" (size {size})" if isinstance(size, int) else ""))
            data[name] = {"kind": decl.kind, "verdict": "ok"}
    return status, out, data


def cmd_gen(args) -> tuple:
    doc = _load(args.file)
    p: PreDFramePresentation = _lookup(doc, args.name, ("predframe",))
    gen = generate_pre_dframe(p)
    report, lines = _axiom_lines(gen.dframe)
    out = dumps(args.name, gen.dframe).rstrip("\n").split("\n") + ["", "# axioms"] + lines
    status = OK if report.is_pre_dframe else FAIL
    return status, out, {"sizes": [gen.dframe.plus.size, gen.dframe.minus.size],
                         "axioms": {r.axiom: r.holds for r in report.results},
                         "text": dumps(args.name, gen.dframe)}


def cmd_check(args) -> tuple:
    doc = _load(args.file)
    p = _lookup(doc, args.name, ("predframe",))
    gen = generate_pre_dframe(p)
    data = LadderData.from_generated(gen)
    reports = evaluate_all(data)
    gate = theorem_contot_gate(data, reports, strict=False)
    stages = stage_implication_suite(data, reports)
    d = gen.dframe
    out = [f"generated {d.plus.size}x{d.minus.size}",
           f"con-tot {'pass' if gate.contot else 'FAIL'} {_witness_text(d, gate.witness) if not gate.contot else ''}".rstrip(),
           f"gate lambda4+ind {'holds' if gate.lambda_bundle else 'fails'}",
           f"gate mu+indep {'holds' if gate.simple_bundle else 'fails'}",
           f"stage violations {len(stages.violations)}"]
    out += [f"  {v}" for v in stages.violations]
    if args.conditions:
        out += [f"  {cid:<9} {'pass' if r.holds else 'FAIL'} {_witness_text(d, r.witness) if not r.holds else ''}".rstrip()
                for cid, r in reports.items()]
    ok = gate.contot and not gate.violations and stages.ok
    payload = {"contot": gate.contot, "witness": gate.witness, "violations": list(gate.violations),
               "separations": list(gate.separations), "stage_violations": list(stages.violations),
               "conditions": {cid: {"holds": r.holds, "witness": r.witness} for cid, r in reports.items()}}
    return (OK if ok else FAIL), out, payload


def cmd_coproduct(args) -> tuple:
    doc = _load(args.file)
    names = [n for n in args.names.split(",") if n]
    if not names:
        raise InputError("--names needs at least one name")
    family = [_as_dframe(_lookup(doc, n, ("dframe", "bispace"))) for n in names]
    spec = dframe_coproduct(family)
    cert = certify(spec)
    text = dumps("coproduct", spec.dframe)
    out = text.rstrip("\n").split("\n") + ["", f"# certificate {'+'.join(names)}",
           f"sizes {cert.sizes[0]} {cert.sizes[1]}",
           f"axioms {'pass' if cert.axioms_ok else 'FAIL'}",
           f"mu {'pass' if all(cert.mu) else 'FAIL'}",
           f"indep {'pass' if all(cert.indep) else 'FAIL'}"]
    for s in cert.strips:
        out.append(f"strip {names[s.index]} {'n/a' if not s.applicable else 'pass' if s.ok else 'FAIL'}")
    for side, r in zip("+-", cert.rec_cross):
        out.append(f"rec-cross{side} checked {r.checked} failures {len(r.failures)} top-pairs {r.top_pairs}")
    for side, b in zip("+-", cert.basics):
        out.append(f"basics{side} {'pass' if b.ok else 'FAIL'}")
    out.append(f"certificate {'ok' if cert.ok else 'FAIL'}")
    payload = {"sizes": list(cert.sizes), "axioms": cert.axioms_ok, "mu": list(cert.mu),
               "indep": list(cert.indep), "ok": cert.ok,
               "rec_cross": [{"checked": r.checked, "failures": len(r.failures)} for r in cert.rec_cross],
               "text": text}
    return (OK if cert.ok else FAIL), out, payload


def cmd_search(args) -> tuple:
    try:
        config = SearchConfig(max_b=args.max_b, max_rel=args.max_rel, mode=args.mode,
                              samples=args.samples, seed=args.seed, workers=args.workers)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    result = run_search(config)
    return (OK if result.ok else FAIL), result.render().rstrip("\n").split("\n"), result.as_dict()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dfrm", description="Finite d-frame toolkit")
    ap.add_argument("--json", action="store_true", help="print a machine-readable report")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print a machine-readable report")

    p = sub.add_parser("validate", help="structural and axiom checks for every declaration", parents=[common])
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen", help="generate the pre-d-frame of a presentation", parents=[common])
    p.add_argument("file")
    p.add_argument("--name", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("check", help="run the condition ladder and theorem gates", parents=[common])
    p.add_argument("file")
    p.add_argument("--name", required=True)
    p.add_argument("--conditions", action="store_true", help="list every condition")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("coproduct", help="build and certify a d-frame coproduct", parents=[common])
    p.add_argument("file")
    p.add_argument("--names", required=True, help="comma separated dframe or bispace names")
    p.set_defaults(func=cmd_coproduct)

    p = sub.add_parser("search", help="sweep small presentations for counterexamples", parents=[common])
    p.add_argument("--max-b", type=int, default=2)
    p.add_argument("--max-rel", type=int, default=2)
    p.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_search)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        status, lines, payload = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return CAPACITY
    except (DFrameError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT
    if args.json:
        print(json.dumps({"status": status, "report": payload}, indent=2, sort_keys=True, default=str))
    else:
        print("\n".join(lines))
    return status


if __name__ == "__main__":
    sys.exit(main())
