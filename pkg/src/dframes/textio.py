"""Line-oriented text format for frames, semilattices, presentations, bispaces and d-frames.

A document is a sequence of blocks. Each block opens with an unindented
``<kind> <name>`` header followed by indented ``key value...`` lines;
``#`` starts a comment. Names must be unique and may only refer to
earlier blocks::

    frame two
      elem 0
      elem 1
      leq 0 1

    dframe d
      plus two
      minus two
      con 0 0
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .closure import PreDFramePresentation
from .dframe import DFrame, FinBispace, omega_d
from .errors import ParseError, StructureError
from .lattice import FinFrame, FinPoset, bits, validate_frame
from .presentation import Cover, FramePresentation, MeetSemilattice, stability_close

KINDS = ("frame", "semilattice", "presentation", "bispace", "dframe", "predframe")
_KEYS = {
    "frame": {"elem", "leq"},
    "semilattice": {"elem", "leq"},
    "presentation": {"base", "cover"},
    "bispace": {"point", "open+", "open-"},
    "dframe": {"plus", "minus", "con", "tot", "omega"},
    "predframe": {"plus", "minus", "con", "tot"},
}
_TOKEN = re.compile(r"\S+")


@dataclass(frozen=True)
class Declaration:
    kind: str
    name: str
    value: object
    line: int = 0
    refs: tuple = ()  # (key, referenced name) pairs, in serialisation order


@dataclass
class Document:
    decls: dict = field(default_factory=dict)

    def __getitem__(self, name: str):
        return self.decls[name].value

    def __contains__(self, name: str) -> bool:
        return name in self.decls

    def names(self, kind: str | None = None) -> list:
        return [n for n, d in self.decls.items() if kind is None or d.kind == kind]

    def add(self, decl: Declaration):
        if decl.name in self.decls:
            raise ValueError(f"duplicate name {decl.name!r}")
        self.decls[decl.name] = decl

    def values_equal(self, other: "Document") -> bool:
        return (list(self.decls) == list(other.decls)
                and all(self.decls[n].kind == other.decls[n].kind
                        and self.decls[n].value == other.decls[n].value for n in self.decls))


@dataclass
class _Line:
    number: int
    tokens: list  # (text, column)

    def key(self):
        return self.tokens[0][0]

    def args(self):
        return [t for t, _ in self.tokens[1:]]

    def col(self, k: int) -> int:
        return self.tokens[k][1] if k < len(self.tokens) else (self.tokens[-1][1] + len(self.tokens[-1][0]))


def _lex(text: str) -> list:
    """Group lines into ``(header, body)`` blocks."""
    blocks = []
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(content)]
        line = _Line(number, tokens)
        if content[0].isspace():
            if not blocks:
                raise ParseError("indented line outside any declaration", number, tokens[0][1])
            blocks[-1][1].append(line)
        else:
            blocks.append((line, []))
    return blocks


def parse(text: str) -> Document:
    doc = Document()
    for header, body in _lex(text):
        kind = header.key()
        if kind not in KINDS:
            raise ParseError(f"unknown declaration kind {kind!r}", header.number, header.col(0))
        if len(header.tokens) != 2:
            raise ParseError(f"expected '{kind} <name>'", header.number, header.col(min(2, len(header.tokens))))
        name = header.tokens[1][0]
        if name in doc:
            raise ParseError(f"duplicate name {name!r}", header.number, header.col(1))
        for line in body:
            if line.key() not in _KEYS[kind]:
                raise ParseError(f"unknown key {line.key()!r} in {kind}", line.number, line.col(0))
        builder = _BUILDERS[kind]
        value, refs = builder(doc, header, body)
        doc.add(Declaration(kind, name, value, header.number, tuple(refs)))
    return doc


def _ref(doc: Document, line: _Line, k: int, kinds: tuple):
    if len(line.tokens) <= k:
        raise ParseError("missing name", line.number, line.col(k))
    name = line.tokens[k][0]
    if name not in doc:
        raise ParseError(f"unknown or forward reference {name!r}", line.number, line.col(k))
    decl = doc.decls[name]
    if decl.kind not in kinds:
        raise ParseError(f"{name!r} is a {decl.kind}, expected {' or '.join(kinds)}", line.number, line.col(k))
    return name, decl.value


def _arity(line: _Line, n: int):
    if len(line.tokens) != n + 1:
        raise ParseError(f"{line.key()} takes {n} argument(s)", line.number, line.col(min(n + 1, len(line.tokens))))


def _single(header: _Line, body: list, key: str, required: bool = True):
    lines = [ln for ln in body if ln.key() == key]
    if len(lines) > 1:
        raise ParseError(f"repeated key {key!r}", lines[1].number, lines[1].col(0))
    if not lines and required:
        raise ParseError(f"missing key {key!r}", header.number, header.col(0))
    return lines[0] if lines else None


def _order(header: _Line, body: list):
    labels, pos = [], {}
    for ln in body:
        if ln.key() == "elem":
            _arity(ln, 1)
            lab = ln.tokens[1][0]
            if lab in pos:
                raise ParseError(f"duplicate element {lab!r}", ln.number, ln.col(1))
            pos[lab] = len(labels)
            labels.append(lab)
    if not labels:
        raise ParseError("no elements declared", header.number, header.col(0))
    pairs = []
    for ln in body:
        if ln.key() == "leq":
            _arity(ln, 2)
            for k in (1, 2):
                if ln.tokens[k][0] not in pos:
                    raise ParseError(f"unknown element {ln.tokens[k][0]!r}", ln.number, ln.col(k))
            pairs.append((pos[ln.tokens[1][0]], pos[ln.tokens[2][0]]))
    return labels, pairs


def _build_frame(doc, header, body):
    labels, pairs = _order(header, body)
    try:
        frame = FinFrame.from_poset(FinPoset.from_relation(labels, pairs))
    except StructureError as exc:
        raise ParseError(f"frame {header.tokens[1][0]}: {exc}", header.number, header.col(1)) from None
    report = validate_frame(frame)
    if not report.ok:
        wit = ",".join(frame.labels[i] for i in report.witness)
        raise ParseError(f"frame {header.tokens[1][0]}: {report.law} fails at ({wit})",
                         header.number, header.col(1))
    return frame, []


def _build_semilattice(doc, header, body):
    labels, pairs = _order(header, body)
    try:
        return MeetSemilattice.from_poset(FinPoset.from_relation(labels, pairs)), []
    except StructureError as exc:
        raise ParseError(f"semilattice {header.tokens[1][0]}: {exc}", header.number, header.col(1)) from None


def _build_presentation(doc, header, body):
    base_line = _single(header, body, "base")
    _arity(base_line, 1)
    base_name, base = _ref(doc, base_line, 1, ("semilattice", "frame"))
    if isinstance(base, FinFrame):
        base = MeetSemilattice.from_frame(base)
    covers = []
    for ln in body:
        if ln.key() != "cover":
            continue
        if len(ln.tokens) < 3 or ln.tokens[2][0] != "<=":
            raise ParseError("expected 'cover <a> <= <u>...'", ln.number, ln.col(2))
        idx = []
        for k in [1] + list(range(3, len(ln.tokens))):
            try:
                idx.append(base.index(ln.tokens[k][0]))
            except StructureError:
                raise ParseError(f"unknown element {ln.tokens[k][0]!r}", ln.number, ln.col(k)) from None
        covers.append(Cover(idx[0], frozenset(idx[1:])))
    try:
        pres = stability_close(FramePresentation(base, tuple(covers)))
    except StructureError as exc:
        raise ParseError(f"presentation {header.tokens[1][0]}: {exc}", header.number, header.col(1)) from None
    return pres, [("base", base_name)]


def _build_bispace(doc, header, body):
    points = []
    for ln in body:
        if ln.key() == "point":
            _arity(ln, 1)
            if ln.tokens[1][0] in points:
                raise ParseError(f"duplicate point {ln.tokens[1][0]!r}", ln.number, ln.col(1))
            points.append(ln.tokens[1][0])
    opens = {"open+": [], "open-": []}
    for ln in body:
        if ln.key() in opens:
            for k, (p, _) in enumerate(ln.tokens[1:], start=1):
                if p not in points:
                    raise ParseError(f"unknown point {p!r}", ln.number, ln.col(k))
            opens[ln.key()].append(ln.args())
    try:
        return FinBispace.generate(points, opens["open+"], opens["open-"]), []
    except StructureError as exc:
        raise ParseError(f"bispace {header.tokens[1][0]}: {exc}", header.number, header.col(1)) from None


def _pairs(body, key, plus_index, minus_index):
    out = []
    for ln in body:
        if ln.key() != key:
            continue
        _arity(ln, 2)
        try:
            a = plus_index(ln.tokens[1][0])
        except StructureError:
            raise ParseError(f"unknown element {ln.tokens[1][0]!r}", ln.number, ln.col(1)) from None
        try:
            b = minus_index(ln.tokens[2][0])
        except StructureError:
            raise ParseError(f"unknown element {ln.tokens[2][0]!r}", ln.number, ln.col(2)) from None
        out.append((a, b))
    return out


def _build_dframe(doc, header, body):
    omega = _single(header, body, "omega", required=False)
    if omega is not None:
        if len(body) != 1:
            raise ParseError("'omega' excludes other keys", header.number, header.col(0))
        _arity(omega, 1)
        name, X = _ref(doc, omega, 1, ("bispace",))
        return omega_d(X), [("omega", name)]
    pl, ml = _single(header, body, "plus"), _single(header, body, "minus")
    _arity(pl, 1)
    _arity(ml, 1)
    pname, plus = _ref(doc, pl, 1, ("frame",))
    mname, minus = _ref(doc, ml, 1, ("frame",))
    con = _pairs(body, "con", plus.index, minus.index)
    tot = _pairs(body, "tot", plus.index, minus.index)
    return DFrame.build(plus, minus, con, tot), [("plus", pname), ("minus", mname)]


def _build_predframe(doc, header, body):
    pl, ml = _single(header, body, "plus"), _single(header, body, "minus")
    _arity(pl, 1)
    _arity(ml, 1)
    pname, pp = _ref(doc, pl, 1, ("presentation",))
    mname, pm = _ref(doc, ml, 1, ("presentation",))
    con = _pairs(body, "con", pp.base.index, pm.base.index)
    tot = _pairs(body, "tot", pp.base.index, pm.base.index)
    return PreDFramePresentation(pp, pm, frozenset(con), frozenset(tot)), [("plus", pname), ("minus", mname)]


_BUILDERS = {
    "frame": _build_frame,
    "semilattice": _build_semilattice,
    "presentation": _build_presentation,
    "bispace": _build_bispace,
    "dframe": _build_dframe,
    "predframe": _build_predframe,
}


# --- serialisation -----------------------------------------------------------

def _token(label) -> str:
    s = str(label)
    if not s or any(c.isspace() for c in s) or "#" in s:
        raise ValueError(f"label {s!r} cannot be written as a token")
    return s


def _order_lines(poset: FinPoset) -> list:
    lines = [f"  elem {_token(l)}" for l in poset.labels]
    lines += [f"  leq {_token(poset.labels[a])} {_token(poset.labels[b])}" for a, b in poset.hasse_edges()]
    return lines


def _decl_lines(decl: Declaration) -> list:
    kind, v = decl.kind, decl.value
    refs = dict(decl.refs)
    out = [f"{kind} {decl.name}"]
    if kind in ("frame", "semilattice"):
        out += _order_lines(v.poset)
    elif kind == "presentation":
        out.append(f"  base {refs['base']}")
        labs = v.base.labels
        for c in v.covers:
            rhs = "".join(f" {_token(labs[u])}" for u in sorted(c.coverers))
            out.append(f"  cover {_token(labs[c.covered])} <={rhs}")
    elif kind == "bispace":
        out += [f"  point {_token(p)}" for p in v.points]
        for key, opens in (("open+", v.opens_plus), ("open-", v.opens_minus)):
            for m in sorted(opens, key=lambda m: (m.bit_count(), m)):
                out.append(f"  {key}" + "".join(f" {v.points[i]}" for i in bits(m)))
    elif kind == "dframe":
        if "omega" in refs:
            out.append(f"  omega {refs['omega']}")
        else:
            out += [f"  plus {refs['plus']}", f"  minus {refs['minus']}"]
            for key, rel in (("con", v.con), ("tot", v.tot)):
                out += [f"  {key} {_token(v.plus.labels[a])} {_token(v.minus.labels[b])}" for a, b in rel]
    elif kind == "predframe":
        out += [f"  plus {refs['plus']}", f"  minus {refs['minus']}"]
        pl, ml = v.pres_plus.base.labels, v.pres_minus.base.labels
        for key, rel in (("con", v.con1), ("tot", v.tot1)):
            out += [f"  {key} {_token(pl[a])} {_token(ml[b])}" for a, b in sorted(rel)]
    return out


def serialize(doc: Document) -> str:
    """Canonical text: blocks in document order, two-space indentation, Hasse edges only."""
    return "\n\n".join("\n".join(_decl_lines(d)) for d in doc.decls.values()) + "\n"


def _kind_of(value) -> str:
    for kind, cls in (("frame", FinFrame), ("semilattice", MeetSemilattice),
                      ("presentation", FramePresentation), ("bispace", FinBispace),
                      ("dframe", DFrame), ("predframe", PreDFramePresentation)):
        if isinstance(value, cls):
            return kind
    raise TypeError(f"cannot serialise {type(value).__name__}")


def build_document(items) -> Document:
    """A document holding ``(name, value)`` items plus every value they depend on.

    Dependencies get derived names (``<name>_plus`` and so on) unless an
    equal value is already present, in which case it is shared.
    """
    doc = Document()

    def put(name, value):
        kind = _kind_of(value)
        for n, d in doc.decls.items():
            if d.kind == kind and d.value == value:
                return n
        refs = []
        if kind == "presentation":
            refs = [("base", put(f"{name}_base", value.base))]
        elif kind == "dframe":
            refs = [("plus", put(f"{name}_plus", value.plus)), ("minus", put(f"{name}_minus", value.minus))]
        elif kind == "predframe":
            refs = [("plus", put(f"{name}_plus", value.pres_plus)),
                    ("minus", put(f"{name}_minus", value.pres_minus))]
        while name in doc:
            name += "_"
        doc.add(Declaration(kind, name, value, 0, tuple(refs)))
        return name

    for name, value in items:
        if name in doc:
            raise ValueError(f"duplicate name {name!r}")
        put(name, value)
    return doc


def dumps(name: str, value) -> str:
    return serialize(build_document([(name, value)]))
