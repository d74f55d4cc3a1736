"""Commutativity of Nambu structures in the low, high and degenerate regimes.

Existence statements (normalizing coordinates, common Hamiltonian fields)
come from flow-box arguments that have no exact polynomial counterpart, so
the high and degenerate tests *verify* caller-supplied witnesses rather than
search for them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .errors import (
    ContextMismatchError,
    DegenerateRegimeError,
    DegreeError,
    LieActionError,
    PreconditionError,
    ReductionError,
    RegimeError,
    WitnessError,
)
from .exterior import (
    CoordinateMap,
    MultiVector,
    pushforward,
    schouten,
    volume_dual,
    wedge,
    wedge_all,
)
from .polyring import Context, _to_fraction
from .structure import _body, is_first_integral, rank, require_nambu, span_at

__all__ = [
    "CommutePair",
    "WitnessStep",
    "HighWitness",
    "LieAction",
    "regime",
    "canonical_blade",
    "commute_low",
    "commute_family",
    "verify_normal_form",
    "common_hamiltonian_check",
    "reduce",
    "commute_high",
    "commute_degenerate",
    "lie_action_nambu",
    "actions_commute",
    "is_integrable_presentation",
]


def _nambu(L) -> MultiVector:
    L = _body(L)
    return require_nambu(L) if L.degree >= 1 else L


def _same_ctx(*items) -> Context:
    ctx = items[0].ctx
    if any(it.ctx != ctx for it in items[1:]):
        raise ContextMismatchError("operands over different contexts")
    return ctx


def canonical_blade(ctx: Context, indices: Sequence[int]) -> MultiVector:
    """d/dx_i1 ^ ... ^ d/dx_iq (the constant 1 for no indices)."""
    if not indices:
        return MultiVector.scalar(ctx.one())
    return MultiVector.basis(ctx, *indices)


def regime(L1, L2) -> str:
    """``"low"``, ``"high"`` or ``"degenerate"``.

    Low: q1 + q2 <= n with L1 ^ L2 not identically zero.  High: q1 + q2 > n
    with the dual forms wedging to a nonzero form (transverse foliations).
    Everything else is degenerate.
    """
    L1, L2 = _body(L1), _body(L2)
    ctx = _same_ctx(L1, L2)
    if L1.degree + L2.degree <= ctx.n:
        return "low" if wedge(L1, L2) else "degenerate"
    return "high" if wedge(volume_dual(L1), volume_dual(L2)) else "degenerate"


@dataclass(frozen=True)
class CommutePair:
    L1: MultiVector
    L2: MultiVector
    regime: str

    @classmethod
    def classify(cls, L1, L2) -> "CommutePair":
        L1, L2 = _nambu(L1), _nambu(L2)
        return cls(L1, L2, regime(L1, L2))


def commute_low(L1, L2) -> bool:
    """[L1, L2] == 0 for q1 + q2 <= n with L1 ^ L2 not identically zero."""
    L1, L2 = _nambu(L1), _nambu(L2)
    ctx = _same_ctx(L1, L2)
    if L1.degree + L2.degree > ctx.n:
        raise RegimeError("q1 + q2 > n: use commute_high")
    if not wedge(L1, L2):
        raise DegenerateRegimeError("L1 ^ L2 vanishes identically: use commute_degenerate")
    return not schouten(L1, L2)


def commute_family(Ls: Sequence) -> bool:
    """Pairwise vanishing brackets and a wedge that is not identically zero."""
    Ls = [_nambu(L) for L in Ls]
    if not Ls:
        raise ValueError("empty family")
    ctx = _same_ctx(*Ls)
    if sum(L.degree for L in Ls) > ctx.n:
        raise RegimeError("total order exceeds the dimension")
    if not wedge_all(Ls):
        return False
    return all(not schouten(a, b) for a, b in combinations(Ls, 2))


def verify_normal_form(L1, L2, phi: CoordinateMap) -> bool:
    """Check that ``phi`` puts the pair into the form D1^..^Dq1, D(q1+1)^..^D(q1+q2)."""
    L1, L2 = _body(L1), _body(L2)
    ctx = _same_ctx(L1, L2)
    q1, q2 = L1.degree, L2.degree
    if q1 + q2 > ctx.n:
        raise RegimeError("normal form needs q1 + q2 <= n")
    return pushforward(phi, L1) == canonical_blade(ctx, range(1, q1 + 1)) and pushforward(
        phi, L2
    ) == canonical_blade(ctx, range(q1 + 1, q1 + q2 + 1))


def common_hamiltonian_check(X: MultiVector, L1, L2) -> bool:
    """X tangent to both structures and preserving both."""
    L1, L2 = _body(L1), _body(L2)
    if not isinstance(X, MultiVector) or X.degree != 1:
        raise DegreeError("a common Hamiltonian field must be a vector field")
    _same_ctx(X, L1, L2)
    return not (wedge(X, L1) or wedge(X, L2) or schouten(X, L1) or schouten(X, L2))


def reduce(L, k: int) -> MultiVector:
    """Theta with L = D1^..^Dk ^ Theta, over the coordinates x_(k+1)..x_n."""
    L = _body(L)
    ctx = L.ctx
    if not 1 <= k <= L.degree:
        raise ReductionError(f"reduction order must lie in 1..{L.degree}")
    if k >= ctx.n:
        raise ReductionError("no coordinates left after reduction")
    head = tuple(range(1, k + 1))
    for blade, coef in L.terms():
        if blade[:k] != head:
            missing = next(i for i in head if i not in blade)
            raise ReductionError(f"L is not divisible by Pi: blade {blade} lacks index {missing}")
        if coef.variables() & set(head):
            raise ReductionError(f"coefficient of {blade} depends on x1..x{k}")
    if schouten(canonical_blade(ctx, head), L):
        raise ReductionError("[Pi, L] does not vanish")
    sub = Context(ctx.n - k, ctx.var_names[k:])
    terms = {
        tuple(i - k for i in blade[k:]): coef.drop_variables(k, sub) for blade, coef in L.terms()
    }
    return MultiVector._raw(sub, L.degree - k, terms)


@dataclass(frozen=True)
class WitnessStep:
    """A common Hamiltonian field and a map straightening it to D1.
    ``phi=None`` means the identity map."""

    X: MultiVector
    phi: CoordinateMap | None = None


@dataclass(frozen=True)
class HighWitness:
    chain: tuple[WitnessStep, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "chain", tuple(self.chain))

    def __len__(self) -> int:
        return len(self.chain)


def commute_high(L1, L2, witness: HighWitness | Sequence[WitnessStep]) -> bool:
    """Commutativity for q1 + q2 - n = k > 0, reducing one dimension per step.

    Each step checks that X is a common Hamiltonian field, that phi sends X
    to D1, and reduces both pushed-forward structures by D1; after k steps the
    low-regime bracket test decides.
    """
    L1, L2 = _nambu(L1), _nambu(L2)
    ctx = _same_ctx(L1, L2)
    k = L1.degree + L2.degree - ctx.n
    if k < 1:
        raise RegimeError("q1 + q2 <= n: use commute_low")
    chain = witness.chain if isinstance(witness, HighWitness) else tuple(witness)
    if len(chain) != k:
        raise WitnessError(f"witness chain has {len(chain)} steps, expected {k}")
    A, B = L1, L2
    for step in chain:
        X = step.X
        if X.ctx != A.ctx:
            raise ContextMismatchError("witness field over the wrong context")
        if not X:
            raise WitnessError("witness field vanishes identically")
        if not common_hamiltonian_check(X, A, B):
            return False
        phi = step.phi or CoordinateMap.identity(A.ctx)
        if pushforward(phi, X) != canonical_blade(A.ctx, (1,)):
            raise WitnessError("coordinate map does not straighten the witness field to D1")
        A, B = pushforward(phi, A), pushforward(phi, B)
        if A.ctx.n == 1:
            # both are c * D1 with constant c; the reductions are the
            # constants themselves, and functions always commute
            for L in (A, B):
                if any(not c.is_constant() for c in L.coefficients()):
                    raise ReductionError("coefficient depends on the straightened coordinate")
            if not A or not B:
                raise DegenerateRegimeError("a reduced structure vanishes identically")
            return True
        A, B = reduce(A, 1), reduce(B, 1)
    return commute_low(A, B)


def commute_degenerate(
    L1, L2, k: int, phi: CoordinateMap, sample: Sequence[Sequence]
) -> bool:
    """Degenerate commutativity with generic intersection dimension ``k``.

    True iff the tangent planes meet in dimension exactly ``k`` at each sample
    point and ``phi`` sends the pair to D1^..^Dq1 and
    D1^..^Dk ^ D(q1+1)^..^D(q1+q2-k).
    """
    L1, L2 = _nambu(L1), _nambu(L2)
    ctx = _same_ctx(L1, L2)
    q1, q2 = L1.degree, L2.degree
    if k < 1 or k > min(q1, q2) or q1 + q2 - k > ctx.n:
        raise RegimeError(f"intersection dimension {k} impossible for orders {q1}, {q2}")
    if wedge(L1, L2):
        raise RegimeError("L1 ^ L2 is not identically zero: use commute_low")
    for pt in sample:
        if not L1.evaluate(pt) or not L2.evaluate(pt):
            raise PreconditionError(f"sample point {tuple(map(str, pt))} annihilates a structure")
        s1, s2 = span_at(L1, pt), span_at(L2, pt)
        if rank(s1) + rank(s2) - rank(s1 + s2) != k:
            return False
    target1 = canonical_blade(ctx, range(1, q1 + 1))
    target2 = canonical_blade(ctx, tuple(range(1, k + 1)) + tuple(range(q1 + 1, q1 + q2 - k + 1)))
    return pushforward(phi, L1) == target1 and pushforward(phi, L2) == target2


@dataclass(frozen=True)
class LieAction:
    """A Lie algebra morphism e_a -> images[a-1] (basis indices are 1-based).

    ``structure_constants`` maps ``(a, b)`` to ``{c: coefficient}`` with
    [e_a, e_b] = sum_c coefficient e_c; the antisymmetric partner of a given
    pair is filled in automatically.
    """

    images: tuple[MultiVector, ...]
    structure_constants: Mapping = field(default_factory=dict)

    def __post_init__(self):
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if not images:
            raise LieActionError("a Lie action needs at least one generator")
        d = len(images)
        ctx = images[0].ctx
        for X in images:
            if not isinstance(X, MultiVector) or X.degree != 1:
                raise LieActionError("images must be vector fields")
            if X.ctx != ctx:
                raise ContextMismatchError("images over different contexts")
        consts: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (a, b), row in dict(self.structure_constants).items():
            if not (1 <= a <= d and 1 <= b <= d) or any(not 1 <= c <= d for c in row):
                raise LieActionError("structure constant index out of range")
            row = {c: _to_fraction(v) for c, v in row.items() if v}
            if a == b and row:
                raise LieActionError(f"[e{a}, e{a}] must vanish")
            consts[(a, b)] = row
        for (a, b), row in list(consts.items()):
            neg = {c: -v for c, v in row.items()}
            if (b, a) in consts:
                if consts[(b, a)] != neg:
                    raise LieActionError(f"structure constants not antisymmetric in ({a}, {b})")
            else:
                consts[(b, a)] = neg
        object.__setattr__(self, "structure_constants", consts)
        for a in range(1, d + 1):
            for b in range(a + 1, d + 1):
                expected = MultiVector.zero(ctx, 1)
                for c, v in consts.get((a, b), {}).items():
                    expected = expected + images[c - 1] * v
                if schouten(images[a - 1], images[b - 1]) != expected:
                    raise LieActionError(f"[rho(e{a}), rho(e{b})] does not match the structure constants")

    @property
    def dim(self) -> int:
        return len(self.images)

    @property
    def ctx(self) -> Context:
        return self.images[0].ctx


def lie_action_nambu(action: LieAction, xi: Mapping[Sequence[int], object]) -> MultiVector:
    """Image of xi in the q-th exterior power of the algebra:
    sum of xi[a1..aq] * rho(e_a1) ^ ... ^ rho(e_aq)."""
    if not xi:
        raise ValueError("xi has no coefficients")
    orders = {len(key) for key in xi}
    if len(orders) != 1:
        raise ValueError("all coefficients of xi must have the same degree")
    (q,) = orders
    if q < 1:
        raise ValueError("xi must have positive degree")
    out = MultiVector.zero(action.ctx, q)
    for key, coef in xi.items():
        if any(not 1 <= a <= action.dim for a in key):
            raise LieActionError(f"coefficient index {tuple(key)} out of range")
        out = out + wedge_all([action.images[a - 1] for a in key]) * _to_fraction(coef)
    return out


def actions_commute(first: LieAction, second: LieAction) -> bool:
    """Every generator image of one action commutes with every image of the other."""
    return all(not schouten(X, Y) for X in first.images for Y in second.images)


def is_integrable_presentation(Ls: Sequence, Fs: Sequence) -> bool:
    """Dimension count, first integrals, pairwise commutativity and a wedge
    that does not vanish identically."""
    Ls = [_nambu(L) for L in Ls]
    if not Ls:
        raise ValueError("an integrable presentation needs at least one structure")
    ctx = _same_ctx(*Ls)
    if any(F.ctx != ctx for F in Fs):
        raise ContextMismatchError("first integrals over a different context")
    if sum(L.degree for L in Ls) + len(Fs) != ctx.n:
        return False
    if not all(is_first_integral(F, L) for F in Fs for L in Ls):
        return False
    return commute_family(Ls)
