"""Command-line interface.

Element grammar (for ``--reduce`` and ``restrict``)::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" exponent)?
    exponent := ["-"] INT | "(" ["-"] INT ")"
    atom   := INT | NAME | "(" expr ")"

Names are the ring's generators (``x1``, ``y2``, ``x_G``...) and the base
ring's basis names. Negative exponents are accepted only in Laurent
contexts (the K-rings) and only on units.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import bundlerings as br
from . import facering as fr
from . import kfacering as kf
from .baserings import BaseCohomRing, BaseKRing, InvalidBase, load_base
from .charpair import CharacteristicPair, GeneralFacePoset, InvalidInput, NonSmoothCone, NonUnimodularVertex, RidgePairingFailure, load_input, validate
from .exactalg import LaurentPoly, NonInvertibleImage

EXIT_OK, EXIT_INVALID, EXIT_PARSE = 0, 1, 2


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")

    def pointer(self) -> str:
        return f"{self.text}\n{' ' * self.position}^"


class ValidationFailure(Exception):
    def __init__(self, report: dict):
        self.report = report
        super().__init__(report.get("summary", "validation failed"))


# ---------------------------------------------------------------------------
# Element parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*^()/.]))")


def _natural(name: str):
    return [int(p) if p.isdigit() else p for p in re.split(r"(\d+)", name)]


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...], laurent: bool):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.vars = variables
        self.laurent = laurent

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2], self.text)
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, tok[2], self.text)

    def parse(self) -> LaurentPoly:
        out = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return out

    def expr(self):
        acc = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.unary()
        while self.peek()[1] == "*":
            self.take()
            acc = acc * self.unary()
        return acc

    def unary(self):
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            v = self.unary()
            return -v if op == "-" else v
        return self.power()

    def power(self):
        base_tok = self.peek()
        base = self.atom()
        if self.peek()[1] != "^":
            return base
        caret = self.take()
        k = self.exponent()
        if k < 0:
            if not self.laurent:
                raise ParseError("negative exponent outside a Laurent ring", caret[2], self.text)
            if not base.is_unit():
                raise ParseError("negative power of a non-unit", base_tok[2], self.text)
        return base**k

    def exponent(self) -> int:
        paren = self.peek()[1] == "("
        if paren:
            self.take()
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        tok = self.peek()
        if tok[0] != "int":
            raise self.error("exponent must be an integer")
        self.take()
        if paren:
            if self.peek()[1] != ")":
                raise self.error("exponent must be an integer")
            self.take()
        return sign * int(tok[1])

    def atom(self):
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            return LaurentPoly.constant(int(tok[1]), self.vars)
        if tok[0] == "name":
            if tok[1] not in self.vars:
                raise self.error(f"unknown variable {tok[1]!r}; expected one of {', '.join(self.vars)}")
            self.take()
            return LaurentPoly.var(tok[1], self.vars)
        if tok[1] == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        raise self.error(f"unexpected {tok[1] or 'end of input'!r}")


def parse_element(expr: str, variables: Sequence[str] | None = None, laurent: bool | None = None) -> LaurentPoly:
    """Parse an integer-coefficient (Laurent) polynomial.

    Without ``variables`` the names found in ``expr`` are used, in natural
    order. ``laurent=None`` allows negative exponents and returns an IntPoly
    whenever the result has none.
    """
    if variables is None:
        names = {m.group("name") for m in _TOKEN.finditer(expr) if m.group("name")}
        variables = tuple(sorted(names, key=_natural))
    allow = True if laurent is None else laurent
    p = _Parser(expr, tuple(variables), allow).parse()
    if laurent:
        return LaurentPoly(p.variables, p.terms)
    if all(x >= 0 for e in p.terms for x in e):
        return p.to_intpoly()
    return p


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------


def resolve(path: str) -> Path:
    """A path on disk, falling back to the bundled fixture with the same file name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("torman") / "data" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(path)


def _load(path: str):
    return load_input(json.loads(resolve(path).read_text()))


def _load_pair(path: str) -> CharacteristicPair:
    obj = _load(path)
    if isinstance(obj, GeneralFacePoset):
        raise ValidationFailure({"valid": False, "summary": "this command needs a homology polytope (pair or fan), got a face poset"})
    rep = validate(obj)
    if not rep.valid:
        raise ValidationFailure({**rep.to_json(), "summary": rep.summary()})
    return obj


def _load_base(path: str | None, kind: str, n: int):
    if path is None:
        return BaseCohomRing.point(n) if kind == "cohomology" else BaseKRing.point(n)
    base = load_base(json.loads(resolve(path).read_text()))
    want = BaseCohomRing if kind == "cohomology" else BaseKRing
    if not isinstance(base, want):
        raise ValidationFailure({"valid": False, "summary": f"base file is not a {kind} base ring"})
    if base.n != n:
        raise ValidationFailure({"valid": False, "summary": f"base ring is for rank {base.n}, fiber torus has rank {n}"})
    return base


def _combo(pairs) -> str:
    """Render an integer combination of named elements."""
    out = ""
    for c, name in pairs:
        if not c:
            continue
        body = name if re.fullmatch(r"[\w*^]+", name) else f"({name})"
        body = body if abs(c) == 1 else f"{abs(c)}*{body}"
        if not out:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out or "0"


def _emit(args, text: str, data, latex: str | None = None):
    if args.format == "json":
        print(json.dumps(data, indent=2, ensure_ascii=False))
    elif args.format == "latex":
        print(latex if latex is not None else text)
    else:
        print(text)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    obj = _load(args.input)
    if isinstance(obj, GeneralFacePoset):
        m = len(obj.vertices)
        _emit(args, f"valid face poset, {m} vertices", {"valid": True, "kind": "poset", "vertices": m})
        return EXIT_OK
    rep = validate(obj)
    _emit(args, rep.summary(), {**rep.to_json(), "summary": rep.summary()})
    return EXIT_OK if rep.valid else EXIT_INVALID


def _reductions_H(pair, exprs):
    out = []
    for e in exprs or ():
        p = parse_element(e, pair.x_names, laurent=False)
        out.append((e, fr.normal_form_poly(pair, fr.reduce_H(pair, p))))
    return out


def cmd_cohomology(args) -> int:
    pair = _load_pair(args.input)
    pres = fr.cohomology_presentation(pair)
    gb = fr.graded_rank_and_basis(pair)
    red = _reductions_H(pair, args.reduce)
    lines = [pres.to_text(), "  basis: " + ", ".join(str(b) for b in gb.as_polys())]
    lines += [f"  {e}  ->  {nf}" for e, nf in red]
    data = {"presentation": pres.to_json(), "graded_basis": gb.to_json(),
            "reductions": [{"input": e, "normal_form": nf.to_json(), "text": str(nf)} for e, nf in red]}
    _emit(args, "\n".join(lines), data, pres.to_latex())
    return EXIT_OK


def cmd_betti(args) -> int:
    pair = _load_pair(args.input)
    gb = fr.graded_rank_and_basis(pair)
    _emit(args, ",".join(map(str, gb.ranks)), {"ranks": gb.ranks, "total": gb.total})
    return EXIT_OK


def cmd_kring(args) -> int:
    pair = _load_pair(args.input)
    pres = kf.k_presentation(pair, args.variant)
    B = kf.default_rt_basis(pair)
    lines = [pres.to_text(), "  basis over RT: " + ", ".join(str(b) for b in B.elements)]
    reds = []
    for e in args.reduce or ():
        p = parse_element(e, pair.y_names, laurent=True)
        coords = kf.reduce_KX(pair, p)
        text = _combo((c, str(b)) for b, c in coords.items())
        reds.append({"input": e, "coordinates": [[str(b), c] for b, c in coords.items()], "text": text})
        lines.append(f"  {e}  ->  {text}")
    data = {"presentation": pres.to_json(), "basis": [b.to_json() for b in B.elements], "reductions": reds}
    _emit(args, "\n".join(lines), data, pres.to_latex())
    return EXIT_OK


def _face_acyclic(args, poset: GeneralFacePoset) -> int:
    base = _load_base(args.base, "cohomology", poset.n)
    ring = br.face_acyclic_ring(poset, base)
    pres = ring.presentation()
    lines = [pres.to_text(), "  graded ranks: " + ",".join(map(str, ring.graded_ranks)), f"  Z-rank: {ring.total_rank}"]
    reds = []
    for e in getattr(args, "reduce", None) or ():
        p = parse_element(e, ring.variables, laurent=False)
        coords = ring.reduce(p)
        text = _combo((c, str(ring.key_poly(k))) for (_, k), c in coords.items())
        reds.append({"input": e, "text": text})
        lines.append(f"  {e}  ->  {text}")
    data = {"presentation": pres.to_json(), "graded_ranks": ring.graded_ranks, "rank": ring.total_rank, "reductions": reds}
    _emit(args, "\n".join(lines), data, pres.to_latex())
    return EXIT_OK


def cmd_bundle_cohomology(args) -> int:
    obj = _load(args.input)
    if isinstance(obj, GeneralFacePoset):
        return _face_acyclic(args, obj)
    pair = _load_pair(args.input)
    base = _load_base(args.base, "cohomology", pair.n)
    pres = br.build_R(pair, base)
    rep = br.verify_rank_R(pair, base)
    lines = [pres.to_text(), f"  {rep}"]
    reds = []
    for e in args.reduce or ():
        nf = br.reduce_R(pair, base, parse_element(e, pair.x_names + base.variables, laurent=False))
        reds.append({"input": e, "normal_form": nf.to_json(), "text": str(nf)})
        lines.append(f"  {e}  ->  {nf}")
    _emit(args, "\n".join(lines), {"presentation": pres.to_json(), "rank": rep.to_json(), "reductions": reds}, pres.to_latex())
    return EXIT_OK


def cmd_bundle_kring(args) -> int:
    pair = _load_pair(args.input)
    base = _load_base(args.base, "k-theory", pair.n)
    pres = br.build_RK(pair, base)
    rep = br.verify_rank_RK(pair, base)
    lines = [pres.to_text(), f"  {rep}"]
    reds = []
    for e in args.reduce or ():
        nf = br.reduce_RK(pair, base, parse_element(e, pair.y_names + base.variables, laurent=True))
        reds.append({"input": e, "normal_form": nf.to_json(), "text": str(nf)})
        lines.append(f"  {e}  ->  {nf}")
    _emit(args, "\n".join(lines), {"presentation": pres.to_json(), "rank": rep.to_json(), "reductions": reds}, pres.to_latex())
    return EXIT_OK


def cmd_restrict(args) -> int:
    pair = _load_pair(args.input)
    p = parse_element(args.element, pair.y_names, laurent=True)
    t = kf.phi(pair, p)
    text = "\n".join(f"{list(a)}: {v}" for a, v in t.values)
    _emit(args, text, t.to_json())
    return EXIT_OK


def cmd_interpolate(args) -> int:
    pair = _load_pair(args.input)
    src = args.tuple
    raw = resolve(src).read_text() if not src.lstrip().startswith("{") else src
    data = json.loads(raw)
    # values may be given as expressions in the vertex variables z_i
    data["values"] = [parse_element(v, kf.z_names(a), laurent=True).to_json() if isinstance(v, str) else v
                      for a, v in zip(data["vertices"], data["values"])]
    t = kf.RestrictionTuple.from_json(data)
    rep = kf.check_compatibility(pair, t)
    if not rep:
        a, b, ra, rb = rep.witness
        raise ValidationFailure({"valid": False, "summary": f"incompatible at {list(a)}, {list(b)}: {ra} != {rb}",
                                 "witness": {"a": list(a), "b": list(b), "r_a": str(ra), "r_b": str(rb)}})
    p = kf.interpolate(pair, t)
    _emit(args, str(p), p.to_json(), p.to_latex())
    return EXIT_OK


def cmd_face_acyclic(args) -> int:
    obj = _load(args.input)
    poset = obj if isinstance(obj, GeneralFacePoset) else GeneralFacePoset.from_pair(_load_pair(args.input))
    return _face_acyclic(args, poset)


def cmd_emit_conjecture(args) -> int:
    obj = _load(args.input)
    poset = obj if isinstance(obj, GeneralFacePoset) else GeneralFacePoset.from_pair(_load_pair(args.input))
    base = _load_base(args.base, "k-theory", poset.n)
    pres = br.emit_conjecture_SJ(poset, base)
    _emit(args, pres.to_text(), pres.to_json(), pres.to_latex())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="torman", description="Cohomology and K-rings of torus manifolds and their bundles.",
                                 epilog=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--format", choices=("text", "json", "latex"), default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help, base=False, reduce=False):
        p = sub.add_parser(name, help=help)
        p.add_argument("input", help="pair, fan or face-poset JSON file")
        if base:
            p.add_argument("--base", help="base ring JSON file (default: a point)")
        if reduce:
            p.add_argument("--reduce", action="append", metavar="EXPR", help="element to put in normal form (repeatable)")
        p.add_argument("--format", choices=("text", "json", "latex"), default=argparse.SUPPRESS)
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "check a characteristic pair, fan or face poset")
    add("cohomology", cmd_cohomology, "presentation and monomial basis of H*(X)", reduce=True)
    add("betti", cmd_betti, "graded ranks of H*(X)")
    k = add("kring", cmd_kring, "presentation of K*(X)", reduce=True)
    k.add_argument("--variant", choices=("x", "y"), default="y")
    add("bundle-cohomology", cmd_bundle_cohomology, "cohomology ring of the bundle over a base", base=True, reduce=True)
    add("bundle-kring", cmd_bundle_kring, "K-ring of the bundle over a base", base=True, reduce=True)
    r = add("restrict", cmd_restrict, "vertex restrictions of a Laurent polynomial in y")
    r.add_argument("element")
    i = add("interpolate", cmd_interpolate, "Laurent polynomial with given vertex restrictions")
    i.add_argument("tuple", help="restriction tuple JSON (file or inline)")
    add("face-acyclic", cmd_face_acyclic, "bundle ring over a face-acyclic orbit space", base=True, reduce=True)
    add("emit-conjecture", cmd_emit_conjecture, "emit the conjectural K-ring presentation", base=True)
    return ap


def run(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ValidationFailure as exc:
        _fail(args, exc.report)
        return EXIT_INVALID
    except (NonUnimodularVertex, NonSmoothCone, RidgePairingFailure, InvalidBase, fr.TorsionDetected, fr.RankMismatch,
            kf.BasisNotFree, kf.IncompatibleTuple, br.FuelExhausted) as exc:
        _fail(args, {"valid": False, "summary": str(exc), "error": type(exc).__name__})
        return EXIT_INVALID
    except ParseError as exc:
        print(f"syntax error: {exc}\n{exc.pointer()}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidInput, json.JSONDecodeError, FileNotFoundError, KeyError, TypeError, NonInvertibleImage) as exc:
        print(f"parse error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE


def _fail(args, report: dict):
    if args.format == "json":
        print(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        print(report.get("summary", "validation failed"))
        for p in report.get("problems", ()):
            print(f"  - {p}")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
