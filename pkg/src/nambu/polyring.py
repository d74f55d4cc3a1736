"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`Polynomial` is an immutable map from exponent vectors to
:class:`fractions.Fraction` coefficients over a fixed :class:`Context`
(dimension and variable names).  Besides ring arithmetic the module provides
exact divisibility, multivariate gcd (recursive content / primitive part plus
a subresultant remainder sequence in the main variable) and square-free
decomposition.

Monomials are ordered graded-reverse-lexicographically with x1 > x2 > ... > xn.
"""

from __future__ import annotations

import contextvars
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import gcd as _igcd
from math import lcm as _ilcm
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ContextMismatchError, FactorizationError, ResourceLimitError

__all__ = [
    "Context",
    "Polynomial",
    "Factorization",
    "divides",
    "exact_quotient",
    "gcd",
    "gcd_many",
    "squarefree_decomposition",
    "is_squarefree",
    "term_limit",
    "set_term_limit",
    "get_term_limit",
]

DEFAULT_TERM_LIMIT = 10**6

_term_limit: contextvars.ContextVar[int] = contextvars.ContextVar(
    "nambu_term_limit", default=DEFAULT_TERM_LIMIT
)


def get_term_limit() -> int:
    return _term_limit.get()


def set_term_limit(limit: int) -> None:
    """Set the term ceiling for the current execution context."""
    if limit < 1:
        raise ValueError("term limit must be positive")
    _term_limit.set(int(limit))


@contextmanager
def term_limit(limit: int):
    """Temporarily change the term ceiling (per thread / task)."""
    if limit < 1:
        raise ValueError("term limit must be positive")
    token = _term_limit.set(int(limit))
    try:
        yield
    finally:
        _term_limit.reset(token)


def _check_size(count: int) -> None:
    limit = _term_limit.get()
    if count > limit:
        raise ResourceLimitError(f"intermediate result has more than {limit} terms")


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)) and not isinstance(value, bool):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def grevlex_key(exp: tuple[int, ...]):
    """Sort key: larger key means larger monomial in grevlex order."""
    return (sum(exp), tuple(-e for e in reversed(exp)))


@dataclass(frozen=True)
class Context:
    """Ambient dimension ``n`` and the names of the coordinates x1..xn."""

    n: int
    var_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError("context dimension must be a positive integer")
        names = tuple(self.var_names)
        if not names:
            names = tuple(f"x{i}" for i in range(1, self.n + 1))
        if len(names) != self.n:
            raise ValueError(f"expected {self.n} variable names, got {len(names)}")
        if len(set(names)) != len(names):
            raise ValueError("variable names must be distinct")
        object.__setattr__(self, "var_names", names)

    @classmethod
    def named(cls, names: Sequence[str]) -> "Context":
        return cls(len(names), tuple(names))

    @property
    def is_positional(self) -> bool:
        return self.var_names == tuple(f"x{i}" for i in range(1, self.n + 1))

    def zero(self) -> "Polynomial":
        return Polynomial(self)

    def one(self) -> "Polynomial":
        return Polynomial.constant(self, 1)

    def const(self, c) -> "Polynomial":
        return Polynomial.constant(self, c)

    def var(self, i: int) -> "Polynomial":
        """The coordinate function x_i (1-based)."""
        return Polynomial.variable(self, i)

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.var(i) for i in range(1, self.n + 1))

    def check_index(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise IndexError(f"variable index {i} outside 1..{self.n}")


class Polynomial:
    """Immutable sparse polynomial over the rationals."""

    __slots__ = ("ctx", "_terms", "_hash")

    def __init__(self, ctx: Context, terms: Mapping[tuple[int, ...], object] | None = None):
        self.ctx = ctx
        clean: dict[tuple[int, ...], Fraction] = {}
        if terms:
            for exp, coef in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != ctx.n or any(e < 0 for e in exp):
                    raise ValueError(f"bad exponent vector {exp} for n={ctx.n}")
                c = _to_fraction(coef)
                if c:
                    clean[exp] = clean.get(exp, 0) + c
            clean = {e: c for e, c in clean.items() if c}
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ctx: Context, terms: dict) -> "Polynomial":
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, ctx: Context, c) -> "Polynomial":
        c = _to_fraction(c)
        return cls._raw(ctx, {(0,) * ctx.n: c} if c else {})

    @classmethod
    def variable(cls, ctx: Context, i: int) -> "Polynomial":
        ctx.check_index(i)
        exp = tuple(1 if j == i - 1 else 0 for j in range(ctx.n))
        return cls._raw(ctx, {exp: Fraction(1)})

    @classmethod
    def monomial(cls, ctx: Context, exp: Sequence[int], coef=1) -> "Polynomial":
        return cls(ctx, {tuple(exp): coef})

    # -- inspection ---------------------------------------------------------

    def terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in grevlex-descending order."""
        return sorted(self._terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and not any(next(iter(self._terms))))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((0,) * self.ctx.n, Fraction(0))

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def leading_term(self) -> tuple[tuple[int, ...], Fraction]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        exp = max(self._terms, key=grevlex_key)
        return exp, self._terms[exp]

    def leading_coefficient(self) -> Fraction:
        return self.leading_term()[1]

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, i: int) -> int:
        self.ctx.check_index(i)
        return max((e[i - 1] for e in self._terms), default=-1)

    def variables(self) -> set[int]:
        """1-based indices of the variables that actually occur."""
        out: set[int] = set()
        for exp in self._terms:
            out.update(j + 1 for j, e in enumerate(exp) if e)
        return out

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ctx != self.ctx:
                raise ContextMismatchError("polynomials over different contexts")
            return other
        return Polynomial.constant(self.ctx, other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        terms = dict(self._terms)
        for exp, c in other._terms.items():
            s = terms.get(exp, 0) + c
            if s:
                terms[exp] = s
            else:
                terms.pop(exp, None)
        return Polynomial._raw(self.ctx, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ctx, {e: -c for e, c in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                c = _to_fraction(other)
            except TypeError:
                return NotImplemented
            if not c:
                return Polynomial._raw(self.ctx, {})
            return Polynomial._raw(self.ctx, {e: v * c for e, v in self._terms.items()})
        other = self._coerce(other)
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        acc: dict[tuple[int, ...], Fraction] = {}
        for e2, c2 in b.items():
            for e1, c1 in a.items():
                e = tuple([x + y for x, y in zip(e1, e2)])
                acc[e] = acc.get(e, 0) + c1 * c2
            _check_size(len(acc))
        return Polynomial._raw(self.ctx, {e: c for e, c in acc.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        """Division by a nonzero rational scalar only; see :func:`divides`."""
        c = _to_fraction(other)
        if not c:
            raise ZeroDivisionError("division by zero")
        return self * (1 / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ctx == other.ctx and self._terms == other._terms
        try:
            c = _to_fraction(other)
        except TypeError:
            return NotImplemented
        return self.is_constant() and self.constant_value() == c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        from .textio import format_polynomial

        return f"Polynomial({format_polynomial(self)!r})"

    def __str__(self):
        from .textio import format_polynomial

        return format_polynomial(self)

    # -- calculus and evaluation -------------------------------------------

    def diff(self, i: int) -> "Polynomial":
        """Partial derivative with respect to x_i (1-based)."""
        self.ctx.check_index(i)
        j = i - 1
        terms = {}
        for exp, c in self._terms.items():
            e = exp[j]
            if e:
                new = exp[:j] + (e - 1,) + exp[j + 1:]
                terms[new] = c * e
        return Polynomial._raw(self.ctx, terms)

    def gradient(self) -> list["Polynomial"]:
        return [self.diff(i) for i in range(1, self.ctx.n + 1)]

    def evaluate(self, point: Sequence) -> Fraction:
        if len(point) != self.ctx.n:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.ctx.n}")
        pt = [_to_fraction(v) for v in point]
        total = Fraction(0)
        for exp, c in self._terms.items():
            term = c
            for v, e in zip(pt, exp):
                if e:
                    term *= v**e
            total += term
        return total

    def substitute(self, values: Sequence["Polynomial"]) -> "Polynomial":
        """Compose: replace x_i by ``values[i-1]`` (all over one target context)."""
        if len(values) != self.ctx.n:
            raise ValueError(f"need {self.ctx.n} substitution values, got {len(values)}")
        target = values[0].ctx
        if any(v.ctx != target for v in values):
            raise ContextMismatchError("substitution values over different contexts")
        powers: list[dict[int, Polynomial]] = [{0: target.one(), 1: v} for v in values]

        def power(i: int, e: int) -> Polynomial:
            cache = powers[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * cache[1]
            return cache[e]

        result = target.zero()
        for exp, c in self._terms.items():
            term = Polynomial.constant(target, c)
            for i, e in enumerate(exp):
                if e:
                    term = term * power(i, e)
            result = result + term
            _check_size(len(result))
        return result

    def drop_variables(self, k: int, ctx: Context) -> "Polynomial":
        """Re-express over ``ctx`` (n - k variables) when x1..xk do not occur."""
        if ctx.n != self.ctx.n - k:
            raise ValueError("target context has the wrong dimension")
        terms = {}
        for exp, c in self._terms.items():
            if any(exp[:k]):
                raise ValueError("polynomial depends on a dropped variable")
            terms[exp[k:]] = c
        return Polynomial._raw(ctx, terms)

    # -- normalization ------------------------------------------------------

    def primitive(self) -> tuple[Fraction, "Polynomial"]:
        """Split as ``content * part`` with ``part`` integral, primitive and
        with positive leading coefficient.  The zero polynomial gives (0, 0)."""
        if not self._terms:
            return Fraction(0), self
        coefs = self._terms.values()
        den = reduce(_ilcm, (c.denominator for c in coefs), 1)
        num = reduce(_igcd, (c.numerator for c in coefs), 0)
        content = Fraction(num, den)
        if self.leading_coefficient() < 0:
            content = -content
        part = {e: c / content for e, c in self._terms.items()}
        return content, Polynomial._raw(self.ctx, part)

    def normalized(self) -> "Polynomial":
        return self.primitive()[1]


# -- divisibility -------------------------------------------------------------


def divides(d: Polynomial, p: Polynomial) -> Polynomial | None:
    """Return ``q`` with ``p == d * q`` exactly, or ``None`` if ``d`` does not divide ``p``."""
    if d.ctx != p.ctx:
        raise ContextMismatchError("polynomials over different contexts")
    if not d:
        raise ZeroDivisionError("divisor is the zero polynomial")
    if not p:
        return d.ctx.zero()
    lexp, lcoef = d.leading_term()
    dterms = list(d._terms.items())
    rem = dict(p._terms)
    quot: dict[tuple[int, ...], Fraction] = {}
    while rem:
        rexp = max(rem, key=grevlex_key)
        shift = tuple(a - b for a, b in zip(rexp, lexp))
        if any(s < 0 for s in shift):
            return None
        c = rem[rexp] / lcoef
        quot[shift] = c
        for exp, dc in dterms:
            e = tuple(a + b for a, b in zip(exp, shift))
            v = rem.get(e, 0) - c * dc
            if v:
                rem[e] = v
            else:
                rem.pop(e, None)
        _check_size(len(rem))
    return Polynomial._raw(p.ctx, quot)


def exact_quotient(p: Polynomial, d: Polynomial) -> Polynomial:
    """``p / d``, raising :class:`ValueError` when the division is not exact."""
    q = divides(d, p)
    if q is None:
        raise ValueError("division is not exact")
    return q


# -- gcd -----------------------------------------------------------------------


def _coeffs_in(p: Polynomial, v: int) -> dict[int, Polynomial]:
    """Coefficients of ``p`` viewed as a polynomial in x_v."""
    j = v - 1
    buckets: dict[int, dict] = {}
    for exp, c in p._terms.items():
        e = exp[j]
        buckets.setdefault(e, {})[exp[:j] + (0,) + exp[j + 1:]] = c
    return {e: Polynomial._raw(p.ctx, t) for e, t in buckets.items()}


def _deg_in(p: Polynomial, v: int) -> int:
    j = v - 1
    return max((e[j] for e in p._terms), default=-1)


def _lc_in(p: Polynomial, v: int) -> Polynomial:
    d = _deg_in(p, v)
    j = v - 1
    return Polynomial._raw(
        p.ctx, {e[:j] + (0,) + e[j + 1:]: c for e, c in p._terms.items() if e[j] == d}
    )


def _x_pow(ctx: Context, v: int, k: int) -> Polynomial:
    exp = [0] * ctx.n
    exp[v - 1] = k
    return Polynomial._raw(ctx, {tuple(exp): Fraction(1)})


def _content_in(p: Polynomial, v: int) -> Polynomial:
    g = None
    for c in _coeffs_in(p, v).values():
        g = c.normalized() if g is None else _gcd(g, c)
        if g.is_constant():
            return p.ctx.one()
    return g


def _prem(a: Polynomial, b: Polynomial, v: int) -> Polynomial:
    """Pseudo-remainder of ``a`` by ``b`` in x_v."""
    da, db = _deg_in(a, v), _deg_in(b, v)
    lcb = _lc_in(b, v)
    r = a
    e = da - db + 1
    while r and _deg_in(r, v) >= db:
        t = _lc_in(r, v) * _x_pow(a.ctx, v, _deg_in(r, v) - db)
        r = lcb * r - t * b
        e -= 1
    return lcb**e * r if e > 0 else r


def _subresultant_gcd(a: Polynomial, b: Polynomial, v: int) -> Polynomial:
    """Gcd of two polynomials that are primitive in x_v with positive x_v-degree."""
    if _deg_in(a, v) < _deg_in(b, v):
        a, b = b, a
    one = a.ctx.one()
    g = h = one
    while True:
        delta = _deg_in(a, v) - _deg_in(b, v)
        r = _prem(a, b, v)
        if not r:
            break
        if _deg_in(r, v) == 0:
            return one
        a = b
        b = exact_quotient(r, g * h**delta)
        g = _lc_in(a, v)
        if delta == 1:
            h = g
        elif delta > 1:
            h = exact_quotient(g**delta, h ** (delta - 1))
    return exact_quotient(b, _content_in(b, v)).normalized()


def _gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    if not a:
        return b.normalized()
    if not b:
        return a.normalized()
    if a.is_constant() or b.is_constant():
        return a.ctx.one()
    va, vb = a.variables(), b.variables()
    v = max(va | vb)
    if v not in va:
        return _gcd(a, _content_in(b, v))
    if v not in vb:
        return _gcd(_content_in(a, v), b)
    ca, cb = _content_in(a, v), _content_in(b, v)
    pa, pb = exact_quotient(a, ca), exact_quotient(b, cb)
    c = _gcd(ca, cb)
    return (c * _subresultant_gcd(pa, pb, v)).normalized()


def gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Greatest common divisor, normalized to be integral, primitive and with
    positive grevlex-leading coefficient (so constants come back as 1)."""
    if a.ctx != b.ctx:
        raise ContextMismatchError("polynomials over different contexts")
    if not a and not b:
        raise ValueError("gcd of two zero polynomials is undefined")
    return _gcd(a, b)


def gcd_many(polys: Iterable[Polynomial]) -> Polynomial:
    polys = [p for p in polys]
    nonzero = [p for p in polys if p]
    if not nonzero:
        raise ValueError("gcd of zero polynomials is undefined")
    g = nonzero[0].normalized()
    for p in nonzero[1:]:
        if g.is_constant():
            break
        g = gcd(g, p)
    return g


# -- square-free decomposition -----------------------------------------------


@dataclass(frozen=True)
class Factorization:
    """``unit * prod(f ** m for f, m in factors)``."""

    unit: Fraction
    factors: tuple[tuple[Polynomial, int], ...]

    def __iter__(self) -> Iterator[tuple[Polynomial, int]]:
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def expand(self, ctx: Context | None = None) -> Polynomial:
        if ctx is None:
            if not self.factors:
                raise ValueError("context required to expand an empty factorization")
            ctx = self.factors[0][0].ctx
        result = ctx.const(self.unit)
        for f, m in self.factors:
            result = result * f**m
        return result

    def validate(self, target: Polynomial | None = None, up_to_unit: bool = False) -> None:
        """Check square-freeness, pairwise coprimality and (optionally) that the
        product reproduces ``target``.  Raises :class:`FactorizationError`."""
        polys = [f for f, _ in self.factors]
        for f, m in self.factors:
            if m < 1:
                raise FactorizationError("multiplicities must be positive")
            if f.is_constant():
                raise FactorizationError("factors must be non-constant")
            if not is_squarefree(f):
                raise FactorizationError(f"factor {f} is not square-free")
        for i in range(len(polys)):
            for j in range(i + 1, len(polys)):
                if not gcd(polys[i], polys[j]).is_constant():
                    raise FactorizationError(f"factors {polys[i]} and {polys[j]} are not coprime")
        if target is None:
            return
        prod = self.expand(target.ctx)
        if up_to_unit:
            if not prod or not target:
                ok = not prod and not target
            else:
                ratio = target.leading_coefficient() / prod.leading_coefficient()
                ok = prod * ratio == target
        else:
            ok = prod == target
        if not ok:
            raise FactorizationError("product of factors does not reproduce the polynomial")


def squarefree_decomposition(p: Polynomial) -> Factorization:
    """Decompose ``p = unit * prod f_i ** i`` with the ``f_i`` square-free,
    primitive and pairwise coprime.

    The repeated part is ``gcd(p, dp/dx1, ..., dp/dxn)``; splitting then
    proceeds by iterated gcds of the square-free kernel with the repeated part.
    """
    if not p:
        raise ValueError("square-free decomposition of the zero polynomial")
    ctx = p.ctx
    if p.is_constant():
        return Factorization(p.constant_value(), ())
    content, pp = p.primitive()
    repeated = pp
    for i in range(1, ctx.n + 1):
        dp = pp.diff(i)
        if dp:
            repeated = gcd(repeated, dp)
            if repeated.is_constant():
                break
    kernel = exact_quotient(pp, repeated)
    factors = []
    mult = 1
    while not kernel.is_constant():
        y = gcd(kernel, repeated)
        z = exact_quotient(kernel, y)
        if not z.is_constant():
            factors.append((z.normalized(), mult))
        mult += 1
        kernel = y
        repeated = exact_quotient(repeated, y)
    fac = Factorization(Fraction(1), tuple(factors))
    unit = p.leading_coefficient() / fac.expand(ctx).leading_coefficient()
    return Factorization(unit, tuple(factors))


def is_squarefree(p: Polynomial) -> bool:
    if not p:
        return False
    if p.is_constant():
        return True
    g = p
    for i in range(1, p.ctx.n + 1):
        dp = p.diff(i)
        if dp:
            g = gcd(g, dp)
            if g.is_constant():
                return True
    return g.is_constant()
