"""Text grammar for space specifications, couple cases and SV expressions.

Typed keyword schemas drive the parser: every failure is a positioned
diagnostic, and ``render`` emits the canonical form with a fixed keyword
order, so parse(render(parse(text))) == parse(text).

Grammar sketch::

    sv      := svterm ('*' svterm)*
    svterm  := svatom ('^' number)?
    svatom  := number | 'l' '(' number (',' number)? ')' | 'bar' '(' sv ')'
             | 'compose' '(' sv ',' number ',' sv ')' | '(' sv ')'
    space   := 'Lq' '(' (number | 'inf') ')'
    spec    := NAME '(' kw '=' value (',' kw '=' value)* ')'
    number  := '-'? digits ('.' digits)? | '-'? int '/' int   (exact rational)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import ParameterError, ParseError
from .holmstedt import CoupleCase
from .reiteration import ReiterationCase
from .spaces import (AType, BType, Classic, Extreme, GammaDouble, GrandLebesgue,
                     Intersection, LClass, LorentzKaramata, RClass, SmallLebesgue)
from .sv import (INF, Bar, ComposePower, Const, Envelope, LogPow, LqSpace,
                 Power, Product, SVExpr)

# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_PUNCT = "(),=*^/"


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", or one of the punctuation characters
    text: str
    pos: int


def _tokenize(text: str) -> list:
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _PUNCT:
            out.append(Token(c, c, i))
            i += 1
            continue
        if c.isdigit() or (c == "-" and i + 1 < n and (text[i + 1].isdigit() or text[i + 1] == ".")) or c == ".":
            j = i + 1 if c == "-" else i
            while j < n and (text[j].isdigit() or text[j] in ".eE"
                             or (text[j] in "+-" and text[j - 1] in "eE")):
                j += 1
            out.append(Token("num", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(Token("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", i, text)
    out.append(Token("end", "", n))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            what = t.text or "end of input"
            raise ParseError(f"expected {kind!r}, found {what!r}", t.pos, self.text)
        return self.next()

    def fail(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.pos, self.text)

    # -- numbers ------------------------------------------------------------

    def number(self) -> Union[int, float, Fraction]:
        t = self.peek()
        if t.kind == "name" and t.text == "inf":
            self.next()
            return INF
        tok = self.expect("num")
        try:
            first: Union[int, float] = int(tok.text)
        except ValueError:
            try:
                first = float(tok.text)
            except ValueError:
                self.fail(f"bad number {tok.text!r}", tok)
        if isinstance(first, int) and self.peek().kind == "/":
            self.next()
            den = self.expect("num")
            try:
                d = int(den.text)
            except ValueError:
                self.fail("rational denominator must be an integer", den)
            if d == 0:
                self.fail("rational denominator must be nonzero", den)
            return Fraction(first, d)
        return first

    # -- slowly varying expressions ------------------------------------------

    def sv(self) -> SVExpr:
        e = self.sv_term()
        while self.peek().kind == "*":
            self.next()
            e = e * self.sv_term()
        return e

    def sv_term(self) -> SVExpr:
        e = self.sv_atom()
        if self.peek().kind == "^":
            self.next()
            r = self.number()
            e = e ** r
        return e

    def sv_atom(self) -> SVExpr:
        t = self.peek()
        if t.kind == "num":
            c = self.number()
            tok = t
            try:
                return Const(float(c))
            except ParameterError as exc:
                self.fail(str(exc), tok)
        if t.kind == "(":
            self.next()
            e = self.sv()
            self.expect(")")
            return e
        if t.kind == "name":
            if t.text == "l":
                self.next()
                self.expect("(")
                a = self.number()
                b = None
                if self.peek().kind == ",":
                    self.next()
                    b = self.number()
                self.expect(")")
                return LogPow(a, a if b is None else b)
            if t.text == "bar":
                self.next()
                self.expect("(")
                e = self.sv()
                self.expect(")")
                return e.bar()
            if t.text == "compose":
                self.next()
                self.expect("(")
                outer = self.sv()
                self.expect(",")
                gtok = self.peek()
                gamma = self.number()
                self.expect(",")
                inner = self.sv()
                self.expect(")")
                if not float(gamma) > 0:
                    self.fail("compose requires gamma > 0", gtok)
                return ComposePower(outer, gamma, inner)
        self.fail(f"expected a slowly varying expression, found {t.text or 'end of input'!r}", t)

    # -- spaces ----------------------------------------------------------------

    def lq(self) -> LqSpace:
        t = self.expect("name")
        if t.text != "Lq":
            self.fail(f"expected Lq(...), found {t.text!r}", t)
        self.expect("(")
        qtok = self.peek()
        q = self.number()
        self.expect(")")
        try:
            return LqSpace(float(q))
        except ParameterError as exc:
            raise ParseError(str(exc), qtok.pos, self.text)

    # -- keyword calls -----------------------------------------------------------

    def kwargs(self, schema: dict, name_tok: Token) -> dict:
        self.expect("(")
        seen: dict = {}
        while True:
            key_tok = self.expect("name")
            key = key_tok.text
            if key not in schema:
                self.fail(f"unknown keyword {key!r} (expected one of {sorted(schema)})", key_tok)
            if key in seen:
                self.fail(f"duplicate keyword {key!r}", key_tok)
            self.expect("=")
            kindv = schema[key]
            if kindv == "num":
                seen[key] = self.number()
            elif kindv == "sv":
                seen[key] = self.sv()
            elif kindv == "space":
                seen[key] = self.lq()
            elif kindv == "couple":
                seen[key] = self.spec()
                if not isinstance(seen[key], CoupleCase):
                    self.fail("expected a couple case here", key_tok)
            if self.peek().kind == ",":
                self.next()
                continue
            break
        self.expect(")")
        missing = [k for k in schema if k not in seen]
        if missing:
            self.fail(f"missing keywords {missing}", name_tok)
        return seen

    def spec(self):
        t = self.expect("name")
        name = t.text
        if name not in _BUILDERS:
            self.fail(f"unknown specification {name!r}", t)
        builder = _BUILDERS[name]
        # Extreme-vs-couple spellings share names RR/LL/RL/LR; peek at the
        # first keyword to pick the schema.
        if name in ("RR", "LL", "RL", "LR"):
            save = self.i
            self.expect("(")
            first = self.expect("name").text
            self.i = save
            builder = _couple_builder(name) if first in _COUPLE_SCHEMA else _extreme_builder(name)
        schema, make = builder
        kw = self.kwargs(schema, t)
        try:
            return make(kw)
        except ParameterError as exc:
            raise ParseError(str(exc), t.pos, self.text)


# ---------------------------------------------------------------------------
# Schemas and builders
# ---------------------------------------------------------------------------

_COUPLE_SCHEMA = {"theta0": "num", "theta1": "num", "a0": "sv", "a1": "sv",
                  "b0": "sv", "b1": "sv", "E0": "space", "E1": "space",
                  "F0": "space", "F1": "space"}
_EXTREME_SCHEMA = {"theta": "num", "c": "sv", "E": "space", "b": "sv",
                   "F": "space", "a": "sv", "G": "space"}


def _couple_builder(kind: str):
    return (_COUPLE_SCHEMA,
            lambda kw: CoupleCase(kind, kw["theta0"], kw["theta1"], kw["a0"], kw["a1"],
                                  kw["b0"], kw["b1"], kw["E0"], kw["E1"], kw["F0"], kw["F1"]))


def _extreme_builder(kind: str):
    return (_EXTREME_SCHEMA,
            lambda kw: Extreme(kind, kw["theta"], kw["c"], kw["E"], kw["b"],
                               kw["F"], kw["a"], kw["G"]))


_BUILDERS = {
    "classic": ({"theta": "num", "b": "sv", "E": "space"},
                lambda kw: Classic(kw["theta"], kw["b"], kw["E"])),
    "R": ({"theta": "num", "b": "sv", "E": "space", "a": "sv", "F": "space"},
          lambda kw: RClass(kw["theta"], kw["b"], kw["E"], kw["a"], kw["F"])),
    "L": ({"theta": "num", "b": "sv", "E": "space", "a": "sv", "F": "space"},
          lambda kw: LClass(kw["theta"], kw["b"], kw["E"], kw["a"], kw["F"])),
    "RR": None, "LL": None, "RL": None, "LR": None,  # resolved in spec()
    "grand": ({"p": "num", "alpha": "num"},
              lambda kw: GrandLebesgue(float(kw["p"]), float(kw["alpha"]))),
    "small": ({"p": "num", "alpha": "num"},
              lambda kw: SmallLebesgue(float(kw["p"]), float(kw["alpha"]))),
    "lk": ({"p": "num", "b": "sv", "E": "space"},
           lambda kw: LorentzKaramata(float(kw["p"]), kw["b"], kw["E"])),
    "gg": ({"p": "num", "q": "num", "uw1": "sv", "w2": "sv"},
           lambda kw: GammaDouble(float(kw["p"]), float(kw["q"]), kw["uw1"], kw["w2"])),
    "A": ({"p": "num", "alpha": "num", "E": "space"},
          lambda kw: AType(float(kw["p"]), float(kw["alpha"]), kw["E"])),
    "B": ({"p": "num", "alpha": "num", "E": "space"},
          lambda kw: BType(float(kw["p"]), float(kw["alpha"]), kw["E"])),
    "reiterate": ({"couple": "couple", "theta": "num", "b": "sv", "E": "space"},
                  lambda kw: ReiterationCase(kw["couple"], kw["theta"], kw["b"], kw["E"])),
}


def parse_spec(text: str):
    """Parse a space spec, couple case or reiteration case; total on any text."""
    try:
        p = _Parser(text)
        out = p.spec()
        end = p.peek()
        if end.kind != "end":
            p.fail(f"trailing input {end.text!r}", end)
        return out
    except ParseError:
        raise
    except Exception as exc:  # lexer/builder edge cases stay positioned
        raise ParseError(str(exc), 0, text)


def parse_sv(text: str) -> SVExpr:
    p = _Parser(text)
    e = p.sv()
    end = p.peek()
    if end.kind != "end":
        p.fail(f"trailing input {end.text!r}", end)
    return e


# ---------------------------------------------------------------------------
# Rendering (canonical form)
# ---------------------------------------------------------------------------

def _fmt_num(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}" if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if x == INF:
        return "inf"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float) and x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def render_sv(e: SVExpr) -> str:
    if isinstance(e, Const):
        return _fmt_num(e.value)
    if isinstance(e, LogPow):
        if e.alpha == e.beta:
            return f"l({_fmt_num(e.alpha)})"
        return f"l({_fmt_num(e.alpha)},{_fmt_num(e.beta)})"
    if isinstance(e, Product):
        return "*".join(_maybe_paren(f) for f in e.factors)
    if isinstance(e, Power):
        return f"{_maybe_paren(e.base)}^{_fmt_num(e.r)}"
    if isinstance(e, Bar):
        return f"bar({render_sv(e.inner)})"
    if isinstance(e, ComposePower):
        return f"compose({render_sv(e.outer)},{_fmt_num(e.gamma)},{render_sv(e.inner)})"
    if isinstance(e, Envelope):
        raise ParameterError("numeric envelopes have no textual form")
    raise ParameterError(f"cannot render {type(e).__name__}")


def _maybe_paren(e: SVExpr) -> str:
    s = render_sv(e)
    return f"({s})" if isinstance(e, (Product, Power)) else s


def _render_lq(s: LqSpace) -> str:
    return f"Lq({_fmt_num(s.q)})"


def render(obj) -> str:
    """Canonical text for any parseable object."""
    if isinstance(obj, Classic):
        return f"classic(theta={_fmt_num(obj.theta)},b={render_sv(obj.b)},E={_render_lq(obj.E)})"
    if isinstance(obj, RClass):
        return (f"R(theta={_fmt_num(obj.theta)},b={render_sv(obj.b)},E={_render_lq(obj.E)},"
                f"a={render_sv(obj.a)},F={_render_lq(obj.F)})")
    if isinstance(obj, LClass):
        return (f"L(theta={_fmt_num(obj.theta)},b={render_sv(obj.b)},E={_render_lq(obj.E)},"
                f"a={render_sv(obj.a)},F={_render_lq(obj.F)})")
    if isinstance(obj, Extreme):
        return (f"{obj.kind}(theta={_fmt_num(obj.theta)},c={render_sv(obj.c)},E={_render_lq(obj.E)},"
                f"b={render_sv(obj.b)},F={_render_lq(obj.F)},a={render_sv(obj.a)},G={_render_lq(obj.G)})")
    if isinstance(obj, GrandLebesgue):
        return f"grand(p={_fmt_num(obj.p)},alpha={_fmt_num(obj.alpha)})"
    if isinstance(obj, SmallLebesgue):
        return f"small(p={_fmt_num(obj.p)},alpha={_fmt_num(obj.alpha)})"
    if isinstance(obj, LorentzKaramata):
        return f"lk(p={_fmt_num(obj.p)},b={render_sv(obj.b)},E={_render_lq(obj.E)})"
    if isinstance(obj, GammaDouble):
        return (f"gg(p={_fmt_num(obj.p)},q={_fmt_num(obj.q)},uw1={render_sv(obj.uw1)},"
                f"w2={render_sv(obj.w2)})")
    if isinstance(obj, AType):
        return f"A(p={_fmt_num(obj.p)},alpha={_fmt_num(obj.alpha)},E={_render_lq(obj.E)})"
    if isinstance(obj, BType):
        return f"B(p={_fmt_num(obj.p)},alpha={_fmt_num(obj.alpha)},E={_render_lq(obj.E)})"
    if isinstance(obj, CoupleCase):
        return (f"{obj.kind}(theta0={_fmt_num(obj.theta0)},theta1={_fmt_num(obj.theta1)},"
                f"a0={render_sv(obj.a0)},a1={render_sv(obj.a1)},"
                f"b0={render_sv(obj.b0)},b1={render_sv(obj.b1)},"
                f"E0={_render_lq(obj.E0)},E1={_render_lq(obj.E1)},"
                f"F0={_render_lq(obj.F0)},F1={_render_lq(obj.F1)})")
    if isinstance(obj, ReiterationCase):
        return (f"reiterate(couple={render(obj.couple)},theta={_fmt_num(obj.theta)},"
                f"b={render_sv(obj.b)},E={_render_lq(obj.E)})")
    if isinstance(obj, Intersection):
        raise ParameterError("intersections are result objects without a textual form")
    raise ParameterError(f"cannot render {type(obj).__name__}")
