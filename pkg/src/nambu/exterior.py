"""Multivector fields and differential forms with polynomial coefficients.

Both kinds are stored as maps from *blades* (strictly increasing tuples of
1-based coordinate indices) to :class:`~nambu.polyring.Polynomial`
coefficients.  A multivector blade ``(i, j)`` stands for d/dx_i ^ d/dx_j, a
form blade for dx_i ^ dx_j.

Sign conventions
----------------
* ``contract(alpha, P)`` is adjoint to the wedge:
  ``<contract(alpha, P), beta> = <P, alpha ^ beta>``.
* ``interior(P, omega)`` is adjoint the other way round:
  ``<interior(P, omega), Q> = <omega, P ^ Q>``; for a vector field this is
  the usual i_X.
* The Schouten bracket satisfies [X, Q] = L_X Q, graded antisymmetry
  [P, Q] = -(-1)^((p-1)(q-1)) [Q, P], and
  [P, Q ^ R] = [P, Q] ^ R + (-1)^((p-1)q) Q ^ [P, R].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import ContextMismatchError, DegreeError, InvalidMapError
from .polyring import Context, Polynomial, _to_fraction

__all__ = [
    "Blade",
    "MultiVector",
    "Form",
    "CoordinateMap",
    "blade_sign",
    "blades",
    "wedge",
    "wedge_all",
    "contract",
    "interior",
    "volume_dual",
    "inverse_dual",
    "exterior_derivative",
    "schouten",
    "lie_bracket",
    "lie_derivative",
    "pushforward",
    "as_point",
]

Blade = tuple  # strictly increasing tuple of 1-based indices


def blade_sign(indices: Iterable[int]) -> tuple[int, Blade]:
    """Sort ``indices`` and return (sign of the sorting permutation, blade).
    The sign is 0 when an index repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    inversions = 0
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            if idx[a] > idx[b]:
                inversions += 1
    return (-1 if inversions & 1 else 1), tuple(sorted(idx))


def blades(n: int, degree: int) -> list[Blade]:
    """All blades of the given degree, in lexicographic order."""
    return list(combinations(range(1, n + 1), degree))


def _merge(a: Blade, b: Blade) -> tuple[int, Blade]:
    if set(a) & set(b):
        return 0, ()
    # inversions between the two sorted runs
    inv = sum(1 for i in a for j in b if i > j)
    return (-1 if inv & 1 else 1), tuple(sorted(a + b))


def _complement(n: int, blade: Blade) -> Blade:
    s = set(blade)
    return tuple(i for i in range(1, n + 1) if i not in s)


def _add_into(acc: dict, blade: Blade, coef: Polynomial) -> None:
    if not coef:
        return
    if blade in acc:
        s = acc[blade] + coef
        if s:
            acc[blade] = s
        else:
            del acc[blade]
    else:
        acc[blade] = coef


class _Graded:
    """Shared implementation of :class:`MultiVector` and :class:`Form`."""

    __slots__ = ("ctx", "degree", "_terms", "_hash")
    kind = "graded"

    def __init__(self, ctx: Context, degree: int, terms=None):
        if degree < 0:
            raise DegreeError("degree must be non-negative")
        self.ctx = ctx
        self.degree = degree
        acc: dict[Blade, Polynomial] = {}
        for idx, coef in (terms.items() if hasattr(terms, "items") else terms or ()):
            idx = tuple(idx)
            if len(idx) != degree:
                raise DegreeError(f"blade {idx} does not have degree {degree}")
            for i in idx:
                ctx.check_index(i)
            if isinstance(coef, Polynomial):
                if coef.ctx != ctx:
                    raise ContextMismatchError("coefficient over a different context")
            else:
                coef = Polynomial.constant(ctx, coef)
            sign, blade = blade_sign(idx)
            if sign:
                _add_into(acc, blade, coef if sign > 0 else -coef)
        self._terms = acc
        self._hash = None

    @classmethod
    def _raw(cls, ctx: Context, degree: int, terms: dict):
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj.degree = degree
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, ctx: Context, degree: int):
        return cls._raw(ctx, degree, {})

    @classmethod
    def basis(cls, ctx: Context, *indices: int, coef=1):
        """Single blade, e.g. ``MultiVector.basis(ctx, 2, 1) == -D1^D2``."""
        return cls(ctx, len(indices), {tuple(indices): coef})

    @classmethod
    def scalar(cls, p: Polynomial):
        return cls._raw(p.ctx, 0, {(): p} if p else {})

    # -- inspection ---------------------------------------------------------

    def terms(self) -> list[tuple[Blade, Polynomial]]:
        """Terms in lexicographically ascending blade order."""
        return sorted(self._terms.items())

    def items(self):
        return self._terms.items()

    def coefficient(self, blade: Sequence[int]) -> Polynomial:
        sign, b = blade_sign(blade)
        c = self._terms.get(b)
        if c is None or not sign:
            return self.ctx.zero()
        return c if sign > 0 else -c

    def coefficients(self) -> list[Polynomial]:
        return [c for _, c in self.terms()]

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def scalar_part(self) -> Polynomial:
        if self.degree != 0:
            raise DegreeError("only degree-0 values have a scalar part")
        return self._terms.get((), self.ctx.zero())

    def evaluate(self, point: Sequence) -> dict[Blade, Fraction]:
        out = {}
        for b, c in self._terms.items():
            v = c.evaluate(point)
            if v:
                out[b] = v
        return out

    def map_coefficients(self, fn):
        acc = {}
        for b, c in self._terms.items():
            _add_into(acc, b, fn(c))
        return type(self)._raw(self.ctx, self.degree, acc)

    # -- arithmetic ---------------------------------------------------------

    def _check_same(self, other) -> None:
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.ctx != self.ctx:
            raise ContextMismatchError("operands over different contexts")

    def _lift(self, other):
        if isinstance(other, Polynomial) and self.degree == 0:
            return type(self).scalar(other)
        if not isinstance(other, _Graded) and self.degree == 0:
            return type(self).scalar(Polynomial.constant(self.ctx, other))
        return other

    def __add__(self, other):
        other = self._lift(other)
        if not isinstance(other, _Graded):
            return NotImplemented
        self._check_same(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        if other.degree != self.degree:
            raise DegreeError(f"cannot add degree {self.degree} and degree {other.degree}")
        acc = dict(self._terms)
        for b, c in other._terms.items():
            _add_into(acc, b, c)
        return type(self)._raw(self.ctx, self.degree, acc)

    __radd__ = __add__

    def __neg__(self):
        return type(self)._raw(self.ctx, self.degree, {b: -c for b, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if not isinstance(other, _Graded):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """Multiplication by a polynomial or rational scalar."""
        if isinstance(other, Polynomial):
            if other.ctx != self.ctx:
                raise ContextMismatchError("scalar over a different context")
        else:
            try:
                other = Polynomial.constant(self.ctx, _to_fraction(other))
            except TypeError:
                return NotImplemented
        if not other:
            return type(self).zero(self.ctx, self.degree)
        acc = {}
        for b, c in self._terms.items():
            _add_into(acc, b, c * other)
        return type(self)._raw(self.ctx, self.degree, acc)

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ctx == other.ctx and (
                (self.degree == 0 or not self._terms) and self.scalar_part_or_zero() == other
            )
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return (self.degree == 0 or not self._terms) and self.scalar_part_or_zero() == other
        if type(other) is not type(self):
            return NotImplemented
        if self.ctx != other.ctx or self._terms != other._terms:
            return False
        return not self._terms or self.degree == other.degree

    def scalar_part_or_zero(self) -> Polynomial:
        return self._terms.get((), self.ctx.zero()) if self.degree == 0 else self.ctx.zero()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.kind, self.ctx, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self):
        from .textio import format_value

        return f"{type(self).__name__}({format_value(self)!r})"

    def __str__(self):
        from .textio import format_value

        return format_value(self)


class MultiVector(_Graded):
    """A multivector field sum f_J d/dx_J; degree 0 holds a plain function."""

    __slots__ = ()
    kind = "multivector"

    @classmethod
    def vector(cls, ctx: Context, components: Sequence) -> "MultiVector":
        if len(components) != ctx.n:
            raise ValueError(f"expected {ctx.n} components")
        return cls(ctx, 1, {(i + 1,): c for i, c in enumerate(components)})

    @classmethod
    def top(cls, ctx: Context) -> "MultiVector":
        return cls.basis(ctx, *range(1, ctx.n + 1))

    def components(self) -> list[Polynomial]:
        if self.degree != 1:
            raise DegreeError("components are defined for vector fields only")
        return [self._terms.get((i,), self.ctx.zero()) for i in range(1, self.ctx.n + 1)]

    def apply(self, f: Polynomial) -> Polynomial:
        """X(f) for a vector field X."""
        if self.degree != 1:
            raise DegreeError("only vector fields act on functions")
        out = self.ctx.zero()
        for (i,), c in self._terms.items():
            out = out + c * f.diff(i)
        return out


class Form(_Graded):
    """A differential form sum f_I dx_I."""

    __slots__ = ()
    kind = "form"

    @classmethod
    def differential(cls, f: Polynomial) -> "Form":
        """df."""
        return cls(f.ctx, 1, {(i,): f.diff(i) for i in range(1, f.ctx.n + 1)})

    @classmethod
    def volume(cls, ctx: Context) -> "Form":
        return cls.basis(ctx, *range(1, ctx.n + 1))


def _as(value, kind: type, ctx: Context | None = None):
    if isinstance(value, _Graded):
        return value
    if isinstance(value, Polynomial):
        return kind.scalar(value)
    raise TypeError(f"expected a multivector, form or polynomial, got {type(value).__name__}")


def _wedge_terms(a: dict, b: dict) -> dict:
    acc: dict = {}
    for ba, ca in a.items():
        for bb, cb in b.items():
            sign, blade = _merge(ba, bb)
            if sign:
                _add_into(acc, blade, ca * cb if sign > 0 else -(ca * cb))
    return acc


def wedge(a, b):
    """Exterior product of two multivectors or two forms (polynomials act as degree 0)."""
    if isinstance(a, Polynomial) and isinstance(b, _Graded):
        a = type(b).scalar(a)
    elif isinstance(b, Polynomial) and isinstance(a, _Graded):
        b = type(a).scalar(b)
    elif isinstance(a, Polynomial) and isinstance(b, Polynomial):
        return a * b
    if type(a) is not type(b):
        raise TypeError("cannot wedge a multivector with a form")
    if a.ctx != b.ctx:
        raise ContextMismatchError("operands over different contexts")
    degree = a.degree + b.degree
    if degree > a.ctx.n:
        return type(a).zero(a.ctx, degree)
    return type(a)._raw(a.ctx, degree, _wedge_terms(a._terms, b._terms))


def wedge_all(items: Sequence, ctx: Context | None = None, kind: type = None):
    """Wedge a sequence left to right; the empty wedge is the constant 1."""
    items = list(items)
    if not items:
        if ctx is None:
            raise ValueError("context required for an empty wedge")
        return (kind or MultiVector).scalar(ctx.one())
    out = items[0]
    for it in items[1:]:
        out = wedge(out, it)
    return out


def _pair_into(outer: dict, inner: dict, ctx: Context) -> dict:
    # removes each `outer` blade from the front of each `inner` blade
    acc: dict = {}
    for bo, co in outer.items():
        so = set(bo)
        for bi, ci in inner.items():
            if not so.issubset(bi):
                continue
            rest = tuple(i for i in bi if i not in so)
            sign, _ = _merge(bo, rest)
            prod = co * ci
            _add_into(acc, rest, prod if sign > 0 else -prod)
    return acc


def contract(alpha, P) -> MultiVector:
    """Contraction of a k-form into a p-vector, giving a (p-k)-vector.

    ``dx1 ⌟ (D1^D2) = D2`` and ``dx2 ⌟ (D1^D2) = -D1``.
    """
    alpha = _as(alpha, Form)
    P = _as(P, MultiVector)
    if not isinstance(alpha, Form) or not isinstance(P, MultiVector):
        raise TypeError("contract expects (Form, MultiVector)")
    if alpha.ctx != P.ctx:
        raise ContextMismatchError("operands over different contexts")
    if alpha.degree > P.degree:
        raise DegreeError(f"cannot contract a {alpha.degree}-form into a {P.degree}-vector")
    return MultiVector._raw(P.ctx, P.degree - alpha.degree, _pair_into(alpha._terms, P._terms, P.ctx))


def interior(P, omega) -> Form:
    """Interior product i_P omega of a p-vector into a k-form (k >= p)."""
    P = _as(P, MultiVector)
    omega = _as(omega, Form)
    if not isinstance(P, MultiVector) or not isinstance(omega, Form):
        raise TypeError("interior expects (MultiVector, Form)")
    if P.ctx != omega.ctx:
        raise ContextMismatchError("operands over different contexts")
    if P.degree > omega.degree:
        raise DegreeError(f"cannot insert a {P.degree}-vector into a {omega.degree}-form")
    return Form._raw(P.ctx, omega.degree - P.degree, _pair_into(P._terms, omega._terms, P.ctx))


def volume_dual(P) -> Form:
    """i_P Omega for Omega = dx1 ^ ... ^ dxn."""
    P = _as(P, MultiVector)
    if not isinstance(P, MultiVector):
        raise TypeError("volume_dual expects a multivector")
    n = P.ctx.n
    acc = {}
    for b, c in P._terms.items():
        comp = _complement(n, b)
        sign, _ = _merge(b, comp)
        acc[comp] = c if sign > 0 else -c
    return Form._raw(P.ctx, n - P.degree, acc)


def inverse_dual(omega) -> MultiVector:
    """Inverse of :func:`volume_dual`."""
    omega = _as(omega, Form)
    if not isinstance(omega, Form):
        raise TypeError("inverse_dual expects a form")
    n = omega.ctx.n
    acc = {}
    for b, c in omega._terms.items():
        comp = _complement(n, b)
        sign, _ = _merge(comp, b)
        acc[comp] = c if sign > 0 else -c
    return MultiVector._raw(omega.ctx, n - omega.degree, acc)


def exterior_derivative(omega) -> Form:
    omega = _as(omega, Form)
    if not isinstance(omega, Form):
        raise TypeError("exterior_derivative expects a form")
    n = omega.ctx.n
    acc: dict = {}
    if omega.degree < n:
        for b, c in omega._terms.items():
            for j in range(1, n + 1):
                if j in b:
                    continue
                dc = c.diff(j)
                if dc:
                    sign, blade = _merge((j,), b)
                    _add_into(acc, blade, dc if sign > 0 else -dc)
    return Form._raw(omega.ctx, omega.degree + 1, acc)


def _strip_right(terms: dict, k: int) -> dict:
    # moves d/dx_k to the right end and removes it
    acc: dict = {}
    for b, c in terms.items():
        if k in b:
            pos = b.index(k)
            rest = b[:pos] + b[pos + 1:]
            _add_into(acc, rest, c if (len(b) - 1 - pos) % 2 == 0 else -c)
    return acc


def _diff_terms(terms: dict, k: int) -> dict:
    acc: dict = {}
    for b, c in terms.items():
        _add_into(acc, b, c.diff(k))
    return acc


def schouten(P, Q) -> MultiVector:
    """Schouten-Nijenhuis bracket [P, Q] of a p-vector and a q-vector.

    Computed in coordinates as
    sum_k (P with d/dx_k stripped on the right) ^ d_k Q
    - (-1)^((p-1)(q-1)) sum_k (Q with d/dx_k stripped on the right) ^ d_k P.
    """
    P = _as(P, MultiVector)
    Q = _as(Q, MultiVector)
    if not isinstance(P, MultiVector) or not isinstance(Q, MultiVector):
        raise TypeError("the Schouten bracket is defined on multivector fields")
    if P.ctx != Q.ctx:
        raise ContextMismatchError("operands over different contexts")
    ctx = P.ctx
    p, q = P.degree, Q.degree
    degree = max(p + q - 1, 0)
    if p + q == 0 or degree > ctx.n:
        return MultiVector.zero(ctx, degree)
    acc: dict = {}
    for k in range(1, ctx.n + 1):
        sp = _strip_right(P._terms, k)
        if sp:
            dq = _diff_terms(Q._terms, k)
            for b, c in _wedge_terms(sp, dq).items():
                _add_into(acc, b, c)
    sign = -1 if ((p - 1) * (q - 1)) % 2 == 0 else 1
    for k in range(1, ctx.n + 1):
        sq = _strip_right(Q._terms, k)
        if sq:
            dp = _diff_terms(P._terms, k)
            for b, c in _wedge_terms(sq, dp).items():
                _add_into(acc, b, c if sign > 0 else -c)
    return MultiVector._raw(ctx, degree, acc)


def lie_bracket(X: MultiVector, Y: MultiVector) -> MultiVector:
    if X.degree != 1 or Y.degree != 1:
        raise DegreeError("the Lie bracket is defined on vector fields")
    return schouten(X, Y)


def lie_derivative(X: MultiVector, T):
    """L_X T for a multivector, a form or a function T."""
    if not isinstance(X, MultiVector) or X.degree != 1:
        raise DegreeError("the Lie derivative needs a vector field")
    if isinstance(T, Polynomial):
        return X.apply(T)
    if isinstance(T, MultiVector):
        return schouten(X, T)
    if isinstance(T, Form):
        if T.ctx != X.ctx:
            raise ContextMismatchError("operands over different contexts")
        if T.degree == 0:
            return Form.scalar(X.apply(T.scalar_part()))
        if T.degree > T.ctx.n:
            return T
        out = interior(X, exterior_derivative(T)) if T.degree < T.ctx.n else Form.zero(T.ctx, T.degree)
        return out + exterior_derivative(interior(X, T))
    raise TypeError(f"cannot take a Lie derivative of {type(T).__name__}")


def as_point(ctx: Context, coords: Sequence) -> tuple[Fraction, ...]:
    if len(coords) != ctx.n:
        raise ValueError(f"point has {len(coords)} coordinates, expected {ctx.n}")
    return tuple(_to_fraction(c) for c in coords)


@dataclass(frozen=True)
class CoordinateMap:
    """A polynomial change of coordinates y = forward(x) with polynomial
    inverse x = inverse(y), both over the same context."""

    ctx: Context
    forward: tuple[Polynomial, ...]
    inverse: tuple[Polynomial, ...]

    def __post_init__(self):
        n = self.ctx.n
        fwd, inv = tuple(self.forward), tuple(self.inverse)
        object.__setattr__(self, "forward", fwd)
        object.__setattr__(self, "inverse", inv)
        if len(fwd) != n or len(inv) != n:
            raise InvalidMapError(f"a coordinate map needs {n} forward and {n} inverse components")
        if any(p.ctx != self.ctx for p in fwd + inv):
            raise ContextMismatchError("map components over a different context")
        gens = self.ctx.gens()
        if any(g.substitute(fwd) != x for g, x in zip(inv, gens)):
            raise InvalidMapError("inverse(forward(x)) != x")
        if any(f.substitute(inv) != y for f, y in zip(fwd, gens)):
            raise InvalidMapError("forward(inverse(y)) != y")

    @classmethod
    def identity(cls, ctx: Context) -> "CoordinateMap":
        gens = ctx.gens()
        return cls(ctx, gens, gens)

    @classmethod
    def shear(cls, ctx: Context, i: int, h: Polynomial) -> "CoordinateMap":
        """x_i -> x_i + h with h independent of x_i."""
        ctx.check_index(i)
        if i in h.variables():
            raise InvalidMapError("a shear term must not involve its own coordinate")
        gens = list(ctx.gens())
        fwd, inv = list(gens), list(gens)
        fwd[i - 1] = gens[i - 1] + h
        inv[i - 1] = gens[i - 1] - h
        return cls(ctx, fwd, inv)

    @classmethod
    def permutation(cls, ctx: Context, perm: Sequence[int]) -> "CoordinateMap":
        """y_i = x_perm[i] (perm given 1-based)."""
        if sorted(perm) != list(range(1, ctx.n + 1)):
            raise InvalidMapError("not a permutation of 1..n")
        gens = ctx.gens()
        fwd = [gens[p - 1] for p in perm]
        inv = [None] * ctx.n
        for i, p in enumerate(perm):
            inv[p - 1] = gens[i]
        return cls(ctx, fwd, inv)

    def inverted(self) -> "CoordinateMap":
        return CoordinateMap(self.ctx, self.inverse, self.forward)

    def compose(self, other: "CoordinateMap") -> "CoordinateMap":
        """``self ∘ other``: first ``other``, then ``self``."""
        if other.ctx != self.ctx:
            raise ContextMismatchError("maps over different contexts")
        fwd = [f.substitute(other.forward) for f in self.forward]
        inv = [g.substitute(self.inverse) for g in other.inverse]
        return CoordinateMap(self.ctx, fwd, inv)

    def __call__(self, point: Sequence) -> tuple[Fraction, ...]:
        return tuple(f.evaluate(point) for f in self.forward)


def pushforward(phi: CoordinateMap, P):
    """phi_* P: Jacobian images of the basis vectors, coefficients composed
    with the inverse map so the result is expressed in target coordinates."""
    if isinstance(P, Polynomial):
        return P.substitute(phi.inverse)
    if not isinstance(P, MultiVector):
        raise TypeError("pushforward is defined for multivector fields")
    if P.ctx != phi.ctx:
        raise ContextMismatchError("map and multivector over different contexts")
    ctx = P.ctx
    images: dict[int, dict] = {}

    def image(j: int) -> dict:
        if j not in images:
            acc: dict = {}
            for i, f in enumerate(phi.forward, start=1):
                _add_into(acc, (i,), f.diff(j).substitute(phi.inverse))
            images[j] = acc
        return images[j]

    acc: dict = {}
    for b, c in P._terms.items():
        term = {(): c.substitute(phi.inverse)}
        for j in b:
            term = _wedge_terms(term, image(j))
        for blade, coef in term.items():
            _add_into(acc, blade, coef)
    return MultiVector._raw(ctx, P.degree, acc)
