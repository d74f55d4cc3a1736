"""Command-line front end.

Exit codes: 0 success or true, 1 false (predicates only), 2 parse or
validation error, 3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from typing import Callable

from . import commute as cm
from . import structure as st
from .errors import NambuError, ResourceLimitError
from .exterior import (
    CoordinateMap,
    Form,
    MultiVector,
    contract,
    exterior_derivative,
    interior,
    inverse_dual,
    lie_derivative,
    pushforward,
    schouten,
    volume_dual,
    wedge_all,
)
from .polyring import (
    Context,
    Factorization,
    Polynomial,
    divides,
    gcd_many,
    get_term_limit,
    squarefree_decomposition,
    term_limit,
)
from .textio import ParseError, parse, parse_list, serialize, to_json_obj, from_json

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR, EXIT_LIMIT = 0, 1, 2, 3

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_RESERVED = re.compile(r"(D|dx)\d+\Z")
_POSITIONAL = re.compile(r"\bx(\d+)\b")


class UsageError(ValueError):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Session:
    """Context plus the name aliasing used for input and output."""

    def __init__(self, ctx_arg: str):
        ctx_arg = ctx_arg.strip()
        if ctx_arg.isdigit():
            self.ctx = Context(int(ctx_arg))
            self.names = None
            return
        names = [s.strip() for s in ctx_arg.split(",")]
        for name in names:
            if not _IDENT.match(name) or _RESERVED.match(name):
                raise UsageError(f"invalid variable name {name!r}")
        self.ctx = Context.named(names)
        self.names = names
        self._alias = re.compile(r"\b(" + "|".join(map(re.escape, names)) + r")\b")
        self._index = {name: i for i, name in enumerate(names, 1)}

    def subcontext(self, k: int) -> Context:
        """Context left after reducing away the first ``k`` coordinates."""
        return Context(self.ctx.n - k, self.ctx.var_names[k:])

    def to_named(self, text: str, offset: int = 0) -> str:
        if self.names is None:
            return text
        return _POSITIONAL.sub(lambda m: self.names[int(m.group(1)) - 1 + offset], text)

    def parse(self, text: str, kind: str | None = None, ctx: Context | None = None):
        ctx = ctx or self.ctx
        offset = self.ctx.n - ctx.n
        text = text.strip()
        if text.startswith("{"):
            return from_json(text)
        if self.names is not None:
            # names of reduced-away coordinates stay unknown
            text = self._alias.sub(
                lambda m: f"x{self._index[m.group(1)] - offset}"
                if self._index[m.group(1)] > offset
                else m.group(1),
                text,
            )
        return parse(text, ctx, kind)

    def parse_list(self, text: str, kind: str | None = None, ctx: Context | None = None):
        ctx = ctx or self.ctx
        if self.names is not None:
            return [self.parse(piece, kind, ctx) for piece in text.split(",")]
        return parse_list(text, ctx, kind)

    def text(self, value) -> str:
        offset = self.ctx.n - value.ctx.n
        return self.to_named(serialize(value, "text"), offset)


# -- output --------------------------------------------------------------------


class Output:
    def __init__(self, session: Session, as_json: bool):
        self.session = session
        self.as_json = as_json

    def _json(self, value):
        if isinstance(value, (Polynomial, MultiVector, Form)):
            return to_json_obj(value)
        if isinstance(value, (bool, int, str)) or value is None:
            return value
        if isinstance(value, Fraction):
            return str(value)
        if isinstance(value, dict):
            return {k: self._json(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [self._json(v) for v in value]
        raise TypeError(f"cannot emit {type(value).__name__}")

    def _text(self, value) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, (Polynomial, MultiVector, Form)):
            return self.session.text(value)
        if isinstance(value, (list, tuple)):
            return ", ".join(self._text(v) for v in value)
        if value is None:
            return "none"
        return str(value)

    def value(self, value) -> int:
        if self.as_json:
            _emit(json.dumps({"result": self._json(value)}))
        else:
            _emit(self._text(value))
        return EXIT_TRUE

    def record(self, fields: dict) -> int:
        if self.as_json:
            _emit(json.dumps({"result": self._json(fields)}))
        else:
            _emit("\n".join(f"{k}: {self._text(v)}" for k, v in fields.items()))
        return EXIT_TRUE

    def verdict(self, ok: bool, witness: dict | None = None) -> int:
        if self.as_json:
            _emit(json.dumps({"verdict": ok, "witness": self._json(witness)}))
        else:
            lines = ["true" if ok else "false"]
            lines += [f"{k}: {self._text(v)}" for k, v in (witness or {}).items()]
            _emit("\n".join(lines))
        return EXIT_TRUE if ok else EXIT_FALSE


def _emit(text: str) -> None:
    sys.stdout.write(text.rstrip("\n") + "\n")


# -- argument helpers ----------------------------------------------------------


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _point(text: str) -> tuple[Fraction, ...]:
    return tuple(_rational(c) for c in text.split(","))


def _factor(s: Session, text: str) -> tuple[Polynomial, int]:
    poly, _, mult = text.rpartition(":") if ":" in text else (text, "", "1")
    try:
        m = int(mult)
    except ValueError:
        raise UsageError(f"bad multiplicity in {text!r}") from None
    return s.parse(poly, "poly"), m


def _map(s: Session, forward: str | None, inverse: str | None, ctx: Context | None = None):
    ctx = ctx or s.ctx
    if forward is None and inverse is None:
        return CoordinateMap.identity(ctx)
    if forward is None or inverse is None:
        raise UsageError("--map-forward and --map-inverse must be given together")
    return CoordinateMap(ctx, s.parse_list(forward, "poly", ctx), s.parse_list(inverse, "poly", ctx))


def _const(text: str) -> tuple[tuple[int, int], int, Fraction]:
    lhs, sep, rhs = text.partition("=")
    try:
        a, b, c = (int(x) for x in lhs.split(","))
    except ValueError:
        raise UsageError(f"expected 'a,b,c=coef', got {text!r}") from None
    return (a, b), c, _rational(rhs if sep else "1")


def _xi(text: str) -> tuple[tuple[int, ...], Fraction]:
    lhs, sep, rhs = text.partition("=")
    try:
        key = tuple(int(x) for x in lhs.split(","))
    except ValueError:
        raise UsageError(f"expected 'a,b,...=coef', got {text!r}") from None
    return key, _rational(rhs if sep else "1")


# -- subcommands ---------------------------------------------------------------


def cmd_fmt(s, out, a):
    return out.value(s.parse(a.expr, a.kind))


def cmd_bracket(s, out, a):
    return out.value(schouten(s.parse(a.first), s.parse(a.second)))


def cmd_wedge(s, out, a):
    return out.value(wedge_all([s.parse(e) for e in a.exprs]))


def cmd_contract(s, out, a):
    first, second = s.parse(a.first), s.parse(a.second)
    if isinstance(first, MultiVector) and isinstance(second, Form):
        return out.value(interior(first, second))
    return out.value(contract(first, second))


def cmd_lie(s, out, a):
    return out.value(lie_derivative(s.parse(a.field, "multivector"), s.parse(a.target)))


def cmd_d(s, out, a):
    value = s.parse(a.expr)
    if isinstance(value, Polynomial):
        value = Form.scalar(value)
    return out.value(exterior_derivative(value))


def cmd_dual(s, out, a):
    value = s.parse(a.expr)
    if isinstance(value, Form):
        return out.value(inverse_dual(value))
    if isinstance(value, Polynomial):
        value = MultiVector.scalar(value)
    return out.value(volume_dual(value))


def cmd_push(s, out, a):
    return out.value(pushforward(_map(s, a.map_forward, a.map_inverse), s.parse(a.expr)))


def cmd_is_nambu(s, out, a):
    return out.verdict(st.is_nambu(s.parse(a.expr, "multivector")))


def cmd_singular(s, out, a):
    loc = st.singular_locus(s.parse(a.expr, "multivector"))
    return out.record(
        {"gcd": loc.gcd, "codim_one": loc.codim_one, "generators": list(loc.generators)}
    )


def cmd_primitive(s, out, a):
    g, P1 = st.primitive_part(s.parse(a.expr, "multivector"))
    return out.record({"gcd": g, "primitive": P1})


def cmd_tangent(s, out, a):
    return out.verdict(st.is_tangent_vector(s.parse(a.field, "multivector"), s.parse(a.structure, "multivector")))


def cmd_cit(s, out, a):
    f = st.is_cit(s.parse(a.field, "multivector"), s.parse(a.structure, "multivector"))
    return out.verdict(f is not None, None if f is None else {"factor": f})


def cmd_hamiltonian(s, out, a):
    return out.value(st.hamiltonian(s.parse(a.structure, "multivector"), [s.parse(f, "poly") for f in a.functions]))


def cmd_mu(s, out, a):
    v = st.mu_contains(s.parse(a.function, "poly"), s.parse(a.structure, "multivector"))
    witness = None if v.member else {"field": v.witness[0], "image": v.witness[1]}
    return out.verdict(v.member, witness)


def cmd_associated(s, out, a):
    L = s.parse(a.structure, "multivector")
    if a.factor:
        fac = [_factor(s, f) for f in a.factor]
    else:
        fac = squarefree_decomposition(st.singular_locus(L).gcd)
    return out.value(st.associated_nambu(L, fac))


def cmd_first_integral(s, out, a):
    return out.verdict(st.is_first_integral(s.parse(a.function, "poly"), s.parse(a.structure, "multivector")))


def cmd_reduce(s, out, a):
    return out.value(cm.reduce(s.parse(a.structure, "multivector"), a.k))


def cmd_commute(s, out, a):
    return out.verdict(cm.commute_low(s.parse(a.first, "multivector"), s.parse(a.second, "multivector")))


def cmd_commute_family(s, out, a):
    return out.verdict(cm.commute_family([s.parse(e, "multivector") for e in a.exprs]))


def cmd_commute_high(s, out, a):
    L1, L2 = s.parse(a.first, "multivector"), s.parse(a.second, "multivector")
    if a.witness_x is None:
        raise UsageError("--witness-x is required")
    pieces = a.witness_x.split(",")
    fwd, inv = a.map_forward or [], a.map_inverse or []
    if len(fwd) != len(inv) or (fwd and len(fwd) != len(pieces)):
        raise UsageError("give one --map-forward/--map-inverse pair per witness step, or none")
    steps = []
    for j, piece in enumerate(pieces):
        sub = s.subcontext(j) if j else s.ctx
        if sub.n < 1:
            raise UsageError("witness chain longer than the dimension")
        X = s.parse(piece, "multivector", sub)
        phi = _map(s, fwd[j], inv[j], sub) if fwd else None
        steps.append(cm.WitnessStep(X, phi))
    return out.verdict(cm.commute_high(L1, L2, cm.HighWitness(steps)))


def cmd_commute_degenerate(s, out, a):
    L1, L2 = s.parse(a.first, "multivector"), s.parse(a.second, "multivector")
    phi = _map(s, a.map_forward, a.map_inverse)
    points = [_point(p) for p in a.point or []]
    return out.verdict(cm.commute_degenerate(L1, L2, a.k, phi, points))


def cmd_normal_form(s, out, a):
    L1, L2 = s.parse(a.first, "multivector"), s.parse(a.second, "multivector")
    return out.verdict(cm.verify_normal_form(L1, L2, _map(s, a.map_forward, a.map_inverse)))


def cmd_lie_action(s, out, a):
    images = [s.parse(e, "multivector") for e in a.image or []]
    consts: dict = {}
    for text in a.const or []:
        pair, c, coef = _const(text)
        consts.setdefault(pair, {})[c] = coef
    xi = dict(_xi(t) for t in a.xi or [])
    action = cm.LieAction(images, consts)
    return out.value(cm.lie_action_nambu(action, xi))


def cmd_integrable(s, out, a):
    Ls = [s.parse(e, "multivector") for e in a.exprs]
    Fs = [s.parse(f, "poly") for f in a.integral or []]
    return out.verdict(cm.is_integrable_presentation(Ls, Fs))


def cmd_gcd(s, out, a):
    return out.value(gcd_many([s.parse(e, "poly") for e in a.exprs]))


def cmd_divides(s, out, a):
    q = divides(s.parse(a.divisor, "poly"), s.parse(a.dividend, "poly"))
    return out.verdict(q is not None, None if q is None else {"quotient": q})


def cmd_sqfree(s, out, a):
    fac: Factorization = squarefree_decomposition(s.parse(a.expr, "poly"))
    if out.as_json:
        return out.value({"unit": fac.unit, "factors": [{"factor": f, "multiplicity": m} for f, m in fac]})
    lines = {"unit": fac.unit}
    lines["factors"] = ", ".join(f"({s.text(f)})^{m}" for f, m in fac) or "none"
    return out.record(lines)


def cmd_diff(s, out, a):
    return out.value(s.parse(a.expr, "poly").diff(a.var))


def cmd_eval(s, out, a):
    value = s.parse(a.expr)
    pt = _point(a.point)
    if isinstance(value, Polynomial):
        return out.value(value.evaluate(pt))
    result = value.evaluate(pt)
    return out.value(type(value)(s.ctx, value.degree, {b: s.ctx.const(c) for b, c in result.items()}))


# -- parser --------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    root = _ArgumentParser(prog="nambu", description="Exact computations with Nambu structures.")
    subs = root.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def add(name: str, fn: Callable, help: str, *positional, nargs_last: str | None = None):
        p = subs.add_parser(name, help=help)
        p.add_argument("--ctx", required=True, help="dimension N or comma-separated variable names")
        p.add_argument("--json", action="store_true", help="emit JSON")
        for i, arg in enumerate(positional):
            if nargs_last and i == len(positional) - 1:
                p.add_argument(arg, nargs=nargs_last)
            else:
                p.add_argument(arg)
        p.set_defaults(fn=fn)
        return p

    def with_map(p, repeat=False):
        action = "append" if repeat else "store"
        p.add_argument("--map-forward", action=action, help="comma-separated forward components")
        p.add_argument("--map-inverse", action=action, help="comma-separated inverse components")
        return p

    add("fmt", cmd_fmt, "parse and print canonically", "expr").add_argument(
        "--kind", choices=["poly", "multivector", "form"]
    )
    add("bracket", cmd_bracket, "Schouten bracket", "first", "second")
    add("wedge", cmd_wedge, "wedge product", "exprs", nargs_last="+")
    add("contract", cmd_contract, "form into multivector, or multivector into form", "first", "second")
    add("lie", cmd_lie, "Lie derivative along a vector field", "field", "target")
    add("d", cmd_d, "exterior derivative", "expr")
    add("dual", cmd_dual, "volume duality (inverse for forms)", "expr")
    with_map(add("push", cmd_push, "pushforward by a coordinate map", "expr"))
    add("is-nambu", cmd_is_nambu, "Nambu test", "expr")
    add("singular", cmd_singular, "singular locus", "expr")
    add("primitive", cmd_primitive, "primitive part", "expr")
    add("tangent", cmd_tangent, "tangency test", "field", "structure")
    add("cit", cmd_cit, "CIT test", "field", "structure")
    add("hamiltonian", cmd_hamiltonian, "Hamiltonian field", "structure", "functions", nargs_last="+")
    add("mu", cmd_mu, "conformal preservation test", "function", "structure")
    add("associated", cmd_associated, "associated Nambu structure", "structure").add_argument(
        "--factor", action="append", help="POLY:MULT factor of the coefficient gcd"
    )
    add("first-integral", cmd_first_integral, "first integral test", "function", "structure")
    add("reduce", cmd_reduce, "reduction by D1 /\\ ... /\\ Dk", "structure").add_argument(
        "--k", type=int, required=True
    )
    add("commute", cmd_commute, "low-regime commutativity", "first", "second")
    add("commute-family", cmd_commute_family, "pairwise commutativity", "exprs", nargs_last="+")
    p = with_map(add("commute-high", cmd_commute_high, "high-regime commutativity", "first", "second"), True)
    p.add_argument("--witness-x", help="witness fields, one per step")
    p = with_map(add("commute-degenerate", cmd_commute_degenerate, "degenerate commutativity", "first", "second"))
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--point", action="append", help="comma-separated sample point")
    with_map(add("normal-form", cmd_normal_form, "verify simultaneous normal form", "first", "second"))
    p = add("lie-action", cmd_lie_action, "Nambu structure of a Lie action")
    p.add_argument("--image", action="append", help="image of a basis element")
    p.add_argument("--const", action="append", help="structure constant a,b,c=coef")
    p.add_argument("--xi", action="append", help="coefficient a1,...,aq=coef")
    add("integrable", cmd_integrable, "integrable presentation test", "exprs", nargs_last="+").add_argument(
        "--integral", action="append", help="first integral"
    )
    add("gcd", cmd_gcd, "polynomial gcd", "exprs", nargs_last="+")
    add("divides", cmd_divides, "exact divisibility", "divisor", "dividend")
    add("sqfree", cmd_sqfree, "square-free decomposition", "expr")
    add("diff", cmd_diff, "partial derivative", "expr").add_argument("--var", type=int, required=True)
    add("eval", cmd_eval, "evaluate at a point", "expr").add_argument("--point", required=True)
    return root


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        limit = int(os.environ.get("NAMBU_TERM_LIMIT", get_term_limit()))
        args = _build_parser().parse_args(argv)
        session = Session(args.ctx)
        with term_limit(limit):
            return args.fn(session, Output(session, args.json), args)
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_TRUE
    except ResourceLimitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_LIMIT
    except ParseError as exc:
        sys.stderr.write(f"error: {exc.kind} at {exc.span.begin}..{exc.span.end}: {exc.message}\n")
        return EXIT_ERROR
    except (NambuError, ValueError, TypeError, ZeroDivisionError, IndexError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
