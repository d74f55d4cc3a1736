"""Recognition and analysis of Nambu structures.

A q-vector field is Nambu when it is pointwise decomposable and its
distribution is involutive.  Both conditions are checked here as exact
polynomial identities on the coordinate contractions ``dx_I ⌟ L`` over all
(q-1)-blades ``I``; at any point where ``L`` does not vanish these vector
fields span the q-plane of ``L``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DegreeError, NotNambuError, PreconditionError
from .exterior import (
    Form,
    MultiVector,
    blades,
    contract,
    schouten,
    wedge,
    wedge_all,
)
from .polyring import (
    Factorization,
    Polynomial,
    divides,
    exact_quotient,
    gcd_many,
    is_squarefree,
)

__all__ = [
    "NambuStructure",
    "SingularLocus",
    "MuVerdict",
    "coordinate_contractions",
    "is_nambu",
    "require_nambu",
    "singular_locus",
    "primitive_part",
    "is_tangent_vector",
    "is_cit",
    "hamiltonian",
    "mu_contains",
    "associated_nambu",
    "is_first_integral",
    "span_at",
    "rank",
    "tangent_at_points",
]


@dataclass(frozen=True)
class NambuStructure:
    body: MultiVector
    validated: bool = False

    @classmethod
    def validate(cls, body: MultiVector) -> "NambuStructure":
        require_nambu(body)
        return cls(body, True)

    @property
    def order(self) -> int:
        return self.body.degree


def _body(x) -> MultiVector:
    if isinstance(x, NambuStructure):
        return x.body
    if not isinstance(x, MultiVector):
        raise TypeError(f"expected a multivector field, got {type(x).__name__}")
    return x


def coordinate_contractions(L) -> list[MultiVector]:
    """The nonzero vector fields dx_I ⌟ L over (q-1)-blades I, in blade order."""
    L = _body(L)
    q = L.degree
    if q < 1:
        raise DegreeError("contractions need degree at least 1")
    out = []
    for I in blades(L.ctx.n, q - 1):
        X = contract(Form.basis(L.ctx, *I), L)
        if X:
            out.append(X)
    return out


def is_nambu(P) -> bool:
    """Exact test: Plücker (decomposability) and Frobenius (involutivity)."""
    P = _body(P)
    q, n = P.degree, P.ctx.n
    if q < 1 or q > n:
        raise DegreeError(f"Nambu order must lie in 1..{n}, got {q}")
    if not P:
        return True
    fields = coordinate_contractions(P)
    for X in fields:
        if wedge(X, P):
            return False
    for a in range(len(fields)):
        for b in range(a + 1, len(fields)):
            if wedge(schouten(fields[a], fields[b]), P):
                return False
    return True


def require_nambu(P) -> MultiVector:
    P = _body(P)
    if not is_nambu(P):
        raise NotNambuError("multivector field is not a Nambu structure")
    return P


@dataclass(frozen=True)
class SingularLocus:
    generators: tuple[Polynomial, ...]
    gcd: Polynomial
    codim_one: bool


def singular_locus(P) -> SingularLocus:
    P = _body(P)
    if not P:
        raise PreconditionError("the zero multivector has no singular locus")
    gens = tuple(P.coefficients())
    g = gcd_many(gens)
    return SingularLocus(gens, g, not g.is_constant())


def primitive_part(P) -> tuple[Polynomial, MultiVector]:
    """``(g, P1)`` with ``P == g * P1`` and the coefficients of ``P1`` coprime."""
    P = _body(P)
    g = singular_locus(P).gcd
    return g, P.map_coefficients(lambda c: exact_quotient(c, g))


def is_tangent_vector(X: MultiVector, L) -> bool:
    L = _body(L)
    if X.degree != 1:
        raise DegreeError("tangency is tested for vector fields")
    return not wedge(X, L)


def is_cit(X: MultiVector, L) -> Polynomial | None:
    """Conformal factor ``f`` with ``L_X L = f L`` and ``X ^ L = 0``, or None.

    Note that the factor may be the zero polynomial, so test the result
    against ``None``.
    """
    L = _body(L)
    if X.degree != 1:
        raise DegreeError("CIT is tested for vector fields")
    if not L:
        raise PreconditionError("CIT test needs a nonzero multivector")
    if wedge(X, L):
        return None
    LXL = schouten(X, L)
    blade, lc = L.terms()[0]
    f = divides(lc, LXL.coefficient(blade))
    if f is None or LXL != L * f:
        return None
    return f


def hamiltonian(L, fs: Sequence[Polynomial]) -> MultiVector:
    """(df_1 ^ ... ^ df_m) ⌟ L for 1 <= m <= q-1."""
    L = _body(L)
    m = len(fs)
    if not 1 <= m <= L.degree - 1:
        raise DegreeError(f"need between 1 and {L.degree - 1} functions, got {m}")
    alpha = wedge_all([Form.differential(f) for f in fs])
    return contract(alpha, L)


@dataclass(frozen=True)
class MuVerdict:
    member: bool
    witness: tuple[MultiVector, Polynomial] | None = None

    def __post_init__(self):
        if self.member == (self.witness is not None):
            raise ValueError("a witness is present exactly when membership fails")

    def __bool__(self) -> bool:
        return self.member


def mu_contains(f: Polynomial, L) -> MuVerdict:
    """Whether ``L`` conformally preserves the (irreducible, caller-asserted) ``f``.

    ``f`` must be square-free and must not divide every coefficient of ``L``.
    Membership holds iff f | X(f) for every coordinate contraction X of ``L``.
    """
    L = _body(L)
    if not f:
        raise PreconditionError("f must be nonzero")
    if not is_squarefree(f):
        raise PreconditionError(f"{f} is not square-free")
    if L.degree < 1:
        raise DegreeError("mu test needs degree at least 1")
    if all(divides(f, c) is not None for c in L.coefficients()):
        raise PreconditionError(f"{f} divides the multivector field")
    for X in coordinate_contractions(L):
        Xf = X.apply(f)
        if divides(f, Xf) is None:
            return MuVerdict(False, (X, Xf))
    return MuVerdict(True)


def _as_factorization(factors) -> Factorization:
    if isinstance(factors, Factorization):
        return factors
    return Factorization(Fraction(1), tuple((p, int(m)) for p, m in factors))


def associated_nambu(L, g_factors) -> MultiVector:
    """Associated Nambu structure of the foliation generated by the CIT fields of ``L``.

    ``g_factors`` factors the gcd of the coefficients of ``L`` into square-free,
    pairwise coprime factors that the caller asserts irreducible.  A factor
    ``p`` of multiplicity ``m`` is kept (once) when ``p`` is not conformally
    preserved by ``L / p**m``, and dropped otherwise.
    """
    L = require_nambu(L)
    g, L1 = primitive_part(L)
    fac = _as_factorization(g_factors)
    fac.validate(g, up_to_unit=True)
    kept = L.ctx.one()
    for p, m in fac:
        cofactor = L.map_coefficients(lambda c: exact_quotient(c, p**m))
        if not mu_contains(p, cofactor).member:
            kept = kept * p
    return L1 * kept


def is_first_integral(F: Polynomial, L) -> bool:
    L = _body(L)
    return not contract(Form.differential(F), L)


# -- pointwise linear algebra --------------------------------------------------


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Exact rank of a rational matrix."""
    m = [list(map(Fraction, r)) for r in rows if any(r)]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c]:
                k = m[i][c] / m[r][c]
                m[i] = [a - k * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def span_at(L, point: Sequence) -> list[list[Fraction]]:
    """Values at ``point`` of the coordinate contractions of ``L``."""
    L = _body(L)
    return [[c.evaluate(point) for c in X.components()] for X in coordinate_contractions(L)]


def tangent_at_points(L, generators: Sequence[MultiVector], points: Sequence[Sequence]) -> bool:
    """Sampled tangency of ``L`` to the foliation spanned by ``generators``:
    at every sample point where ``L`` does not vanish, the generators span
    exactly the q-plane of ``L``."""
    L = _body(L)
    q = L.degree
    for pt in points:
        if not L.evaluate(pt):
            continue
        own = span_at(L, pt)
        gen = [[c.evaluate(pt) for c in X.components()] for X in generators]
        if rank(gen) != q or rank(own + gen) != q:
            return False
    return True
