"""Text and JSON interchange for polynomials, multivector fields and forms.

Grammar (whitespace is insignificant)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := scalar ('*' blade)? | blade
    scalar := factor ('*' factor)*
    factor := atom ('^' POSINT)*
    atom   := RATIONAL | VAR | '(' expr ')'
    blade  := AXIS ('/\\' AXIS)*
    AXIS   := 'D' INT | 'dx' INT
    VAR    := 'x' INT

``RATIONAL`` is ``INT`` or ``INT/INT`` written without spaces.  Blades are
sorted on input with the permutation sign absorbed into the coefficient.

Canonical text output lists blades in ascending lexicographic order and the
monomials of each coefficient in descending grevlex order.  ``parse`` of the
canonical text gives back an equal value.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import NambuError
from .exterior import Form, MultiVector, _Graded, blade_sign
from .polyring import Context, Polynomial

__all__ = [
    "SourceSpan",
    "ParseError",
    "parse",
    "parse_list",
    "format_polynomial",
    "format_value",
    "serialize",
    "to_json_obj",
    "from_json",
    "from_json_obj",
]

KINDS = ("poly", "multivector", "form")


@dataclass(frozen=True)
class SourceSpan:
    begin: int
    end: int


class ParseError(NambuError, ValueError):
    """Malformed input; ``kind`` is one of lex, syntax, degree-mismatch,
    unknown-variable, index-range."""

    def __init__(self, kind: str, message: str, span: SourceSpan):
        super().__init__(f"{kind} error at {span.begin}..{span.end}: {message}")
        self.kind = kind
        self.span = span
        self.message = message


# -- formatting ----------------------------------------------------------------


def _format_monomial(exp) -> str:
    parts = []
    for i, e in enumerate(exp, start=1):
        if e == 1:
            parts.append(f"x{i}")
        elif e > 1:
            parts.append(f"x{i}^{e}")
    return " * ".join(parts)


def format_polynomial(p: Polynomial) -> str:
    terms = p.terms()
    if not terms:
        return "0"
    out = []
    for k, (exp, c) in enumerate(terms):
        mono = _format_monomial(exp)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag} * {mono}"
        if k == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def _format_blade(blade, prefix: str) -> str:
    return " /\\ ".join(f"{prefix}{i}" for i in blade)


def format_value(value) -> str:
    """Canonical text of a Polynomial, MultiVector or Form."""
    if isinstance(value, Polynomial):
        return format_polynomial(value)
    if not isinstance(value, _Graded):
        raise TypeError(f"cannot format {type(value).__name__}")
    prefix = "D" if isinstance(value, MultiVector) else "dx"
    terms = value.terms()
    if not terms:
        return "0"
    pieces = []
    for blade, coef in terms:
        ctext = format_polynomial(coef)
        if not blade:
            pieces.append(ctext)
            continue
        btext = _format_blade(blade, prefix)
        if coef == 1:
            pieces.append(btext)
        elif len(coef) == 1:
            pieces.append(f"{ctext} * {btext}")
        else:
            pieces.append(f"({ctext}) * {btext}")
    out = pieces[0]
    for piece in pieces[1:]:
        out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
    return out


# -- JSON ----------------------------------------------------------------------


def _kind_of(value) -> str:
    if isinstance(value, Polynomial):
        return "poly"
    if isinstance(value, MultiVector):
        return "multivector"
    if isinstance(value, Form):
        return "form"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _poly_json(p: Polynomial) -> list:
    return [{"coef": str(c), "exp": list(exp)} for exp, c in p.terms()]


def to_json_obj(value) -> dict:
    kind = _kind_of(value)
    ctx = value.ctx
    if kind == "poly":
        degree = 0
        terms = [{"blade": [], "poly": _poly_json(value)}] if value else []
    else:
        degree = value.degree
        terms = [{"blade": list(b), "poly": _poly_json(c)} for b, c in value.terms()]
    return {
        "n": ctx.n,
        "vars": list(ctx.var_names),
        "kind": kind,
        "degree": degree,
        "terms": terms,
    }


def serialize(value, fmt: str = "text") -> str:
    """Deterministic serialization; ``fmt`` is ``"text"`` or ``"json"``."""
    if fmt == "text":
        return format_value(value)
    if fmt == "json":
        return json.dumps(to_json_obj(value))
    raise ValueError(f"unknown format {fmt!r}")


def from_json_obj(obj: dict):
    def bad(msg):
        return ParseError("syntax", msg, SourceSpan(0, 0))

    try:
        ctx = Context(int(obj["n"]), tuple(obj["vars"]))
        kind = obj["kind"]
        degree = int(obj["degree"])
        terms = obj["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise bad(f"malformed value object: {exc}") from None
    if kind not in KINDS:
        raise bad(f"unknown kind {kind!r}")
    built = {}
    for t in terms:
        try:
            poly = Polynomial(ctx, {tuple(m["exp"]): Fraction(m["coef"]) for m in t["poly"]})
            blade = tuple(int(i) for i in t["blade"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise bad(f"malformed term: {exc}") from None
        built[blade] = poly
    if kind == "poly":
        if degree != 0 or any(built_blade for built_blade in built):
            raise bad("a polynomial has degree 0 and empty blades")
        return built.get((), ctx.zero())
    cls = MultiVector if kind == "multivector" else Form
    try:
        return cls(ctx, degree, built)
    except (ValueError, IndexError) as exc:
        raise bad(str(exc)) from None


def from_json(text: str):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("lex", str(exc), SourceSpan(exc.pos, exc.pos)) from None
    return from_json_obj(obj)


# -- parsing -------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<wedge>/\\)|(?P<op>[-+*^()]))"
)
_AXIS_D = re.compile(r"D(\d+)\Z")
_AXIS_DX = re.compile(r"dx(\d+)\Z")
_VAR = re.compile(r"x(\d+)\Z")


@dataclass
class _Tok:
    type: str
    text: str
    begin: int
    end: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError("lex", f"unexpected character {text[start]!r}", SourceSpan(start, start + 1))
        typ = m.lastgroup
        toks.append(_Tok(typ, m.group(typ), m.start(typ), m.end(typ)))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text), len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ctx: Context, kind: str | None):
        self.text = text
        self.ctx = ctx
        self.kind = kind
        self.toks = _tokenize(text)
        self.i = 0
        self.axis_kind: str | None = None  # "D" or "dx"

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, kind: str, msg: str, tok: _Tok) -> ParseError:
        return ParseError(kind, msg, SourceSpan(tok.begin, tok.end))

    def expect_op(self, op: str) -> _Tok:
        tok = self.next()
        if tok.type != "op" or tok.text != op:
            raise self.error("syntax", f"expected {op!r}", tok)
        return tok

    def is_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok.type == "op" and tok.text in ops

    def is_axis(self) -> bool:
        tok = self.peek()
        return tok.type == "ident" and bool(_AXIS_D.match(tok.text) or _AXIS_DX.match(tok.text))

    # expr returns (terms: dict blade -> Polynomial, degree or None)
    def expr(self, allow_blades: bool):
        acc: dict = {}
        degree = None
        sign = 1
        if self.is_op("-", "+"):
            sign = -1 if self.next().text == "-" else 1
        while True:
            start = self.peek()
            blade_sign_, blade, coef = self.term(allow_blades)
            if degree is None:
                degree = len(blade)
            elif len(blade) != degree:
                raise ParseError(
                    "degree-mismatch",
                    f"term of degree {len(blade)} in a sum of degree {degree}",
                    SourceSpan(start.begin, self.toks[self.i - 1].end),
                )
            coef = coef * (sign * blade_sign_)
            if blade_sign_:
                acc[blade] = acc.get(blade, self.ctx.zero()) + coef
            if self.is_op("+", "-"):
                sign = -1 if self.next().text == "-" else 1
                continue
            break
        return {b: c for b, c in acc.items() if c}, degree

    def term(self, allow_blades: bool):
        if self.is_axis():
            s, b = self.blade(allow_blades)
            return s, b, self.ctx.one()
        coef = self.factor()
        while self.is_op("*"):
            self.next()
            if self.is_axis():
                s, b = self.blade(allow_blades)
                return s, b, coef
            coef = coef * self.factor()
        return 1, (), coef

    def blade(self, allow_blades: bool):
        idx = [self.axis(allow_blades)]
        while self.peek().type == "wedge":
            self.next()
            if not self.is_axis():
                raise self.error("syntax", "expected an axis after '/\\'", self.peek())
            idx.append(self.axis(allow_blades))
        sign, blade = blade_sign(idx)
        if not sign:
            blade = tuple(sorted(idx))
        return sign, blade

    def axis(self, allow_blades: bool) -> int:
        tok = self.next()
        m = _AXIS_D.match(tok.text)
        ak = "D"
        if not m:
            m = _AXIS_DX.match(tok.text)
            ak = "dx"
        if not allow_blades:
            raise self.error("syntax", "blade not allowed here", tok)
        if self.kind == "poly":
            raise self.error("syntax", "a polynomial cannot contain blades", tok)
        if self.kind == "multivector" and ak == "dx":
            raise self.error("syntax", "form axis in a multivector expression", tok)
        if self.kind == "form" and ak == "D":
            raise self.error("syntax", "vector axis in a form expression", tok)
        if self.axis_kind is None:
            self.axis_kind = ak
        elif self.axis_kind != ak:
            raise self.error("syntax", "cannot mix D and dx in one expression", tok)
        i = int(m.group(1))
        if not 1 <= i <= self.ctx.n:
            raise self.error("index-range", f"axis index {i} outside 1..{self.ctx.n}", tok)
        return i

    def factor(self) -> Polynomial:
        base = self.atom()
        while self.is_op("^"):
            self.next()
            tok = self.next()
            if tok.type != "num" or "/" in tok.text or int(tok.text) < 1:
                raise self.error("syntax", "exponent must be a positive integer", tok)
            base = base ** int(tok.text)
        return base

    def atom(self) -> Polynomial:
        tok = self.next()
        if tok.type == "num":
            try:
                return self.ctx.const(Fraction(tok.text))
            except ZeroDivisionError:
                raise self.error("syntax", "zero denominator", tok) from None
        if tok.type == "ident":
            m = _VAR.match(tok.text)
            if m:
                i = int(m.group(1))
                if 1 <= i <= self.ctx.n:
                    return self.ctx.var(i)
            if _AXIS_D.match(tok.text) or _AXIS_DX.match(tok.text):
                raise self.error("syntax", "blade must come last in a term", tok)
            raise self.error("unknown-variable", f"unknown variable {tok.text!r}", tok)
        if tok.type == "op" and tok.text == "(":
            terms, _ = self.expr(allow_blades=False)
            self.expect_op(")")
            return terms.get((), self.ctx.zero())
        if tok.type == "eof":
            raise self.error("syntax", "unexpected end of input", tok)
        raise self.error("syntax", f"unexpected token {tok.text!r}", tok)


def parse(text: str, ctx: Context, kind: str | None = None):
    """Parse ``text`` under ``ctx``.  ``kind`` is ``"poly"``, ``"multivector"``,
    ``"form"`` or ``None`` to infer it from the axes used."""
    if kind is not None and kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    parser = _Parser(text, ctx, kind)
    terms, degree = parser.expr(allow_blades=True)
    tok = parser.peek()
    if tok.type != "eof":
        raise parser.error("syntax", f"unexpected token {tok.text!r}", tok)
    if kind is None:
        kind = {"D": "multivector", "dx": "form", None: "poly"}[parser.axis_kind]
    if kind == "poly":
        return terms.get((), ctx.zero())
    cls = MultiVector if kind == "multivector" else Form
    return cls._raw(ctx, degree or 0, terms)


def parse_list(text: str, ctx: Context, kind: str | None = None) -> list:
    """Comma-separated list of expressions."""
    out = []
    offset = 0
    for piece in text.split(","):
        try:
            out.append(parse(piece, ctx, kind))
        except ParseError as exc:
            span = SourceSpan(exc.span.begin + offset, exc.span.end + offset)
            raise ParseError(exc.kind, exc.message, span) from None
        offset += len(piece) + 1
    return out
