import itertools
import random
from fractions import Fraction

import pytest

from nambu import (
    CommutePair,
    Context,
    CoordinateMap,
    HighWitness,
    LieAction,
    MultiVector,
    WitnessStep,
    actions_commute,
    canonical_blade,
    common_hamiltonian_check,
    commute_degenerate,
    commute_family,
    commute_high,
    commute_low,
    is_integrable_presentation,
    lie_action_nambu,
    pushforward,
    reduce,
    verify_normal_form,
    wedge,
)
from nambu.errors import (
    DegenerateRegimeError,
    LieActionError,
    NotNambuError,
    PreconditionError,
    ReductionError,
    RegimeError,
    WitnessError,
)
from nambu.textio import parse

from strategies import rand_multivector, rand_poly, rand_shear

C2, C3, C4, C5 = (Context(n) for n in (2, 3, 4, 5))


def V(text, ctx):
    return parse(text, ctx, "multivector")


def F(text, ctx):
    return parse(text, ctx, "poly")


@pytest.mark.parametrize(
    "a, b, ctx, expected",
    [("D1 /\\ D2", "D3 /\\ D4", C4, True), ("D1", "x1 * D2", C3, False), ("D1 /\\ D2", "x1 * D3 /\\ D4", C5, False)],
)
def test_commute_low_examples(a, b, ctx, expected):
    assert commute_low(V(a, ctx), V(b, ctx)) is expected


def test_commute_low_regime_errors():
    with pytest.raises(RegimeError):
        commute_low(V("D1 /\\ D2", C3), V("D1 /\\ D3", C3))
    with pytest.raises(DegenerateRegimeError):
        commute_low(V("D1", C3), V("x2 * D1", C3))
    with pytest.raises(NotNambuError):
        commute_low(V("D1 /\\ D2 + D3 /\\ D4", C5), V("D5", C5))


def test_regime_classification():
    assert CommutePair.classify(V("D1", C3), V("D2", C3)).regime == "low"
    assert CommutePair.classify(V("D1", C3), V("D1", C3)).regime == "degenerate"
    assert CommutePair.classify(V("D1 /\\ D2", C3), V("D1 /\\ D3", C3)).regime == "high"
    assert CommutePair.classify(V("D1 /\\ D2", C3), V("D1 /\\ D2", C3)).regime == "degenerate"


@pytest.mark.parametrize(
    "items, ctx, expected",
    [(["D1", "D2", "D3 /\\ D4"], C4, True), (["D1", "x1 * D2", "D3"], C3, False), (["D1", "D1"], C2, False)],
)
def test_commute_family_examples(items, ctx, expected):
    assert commute_family([V(t, ctx) for t in items]) is expected


def test_commute_family_overflow():
    with pytest.raises(RegimeError):
        commute_family([V("D1 /\\ D2", C3), V("D3 /\\ D1", C3)])


def test_verify_normal_form_examples():
    L1, L2 = V("D1 /\\ D2", C4), V("D3 /\\ D4", C4)
    assert verify_normal_form(L1, L2, CoordinateMap.identity(C4))
    shear = CoordinateMap.shear(C4, 2, F("x1^2", C4))
    assert verify_normal_form(pushforward(shear, L1), pushforward(shear, L2), shear.inverted())
    assert not verify_normal_form(L1, L2, CoordinateMap.shear(C4, 3, F("x1^2", C4)))


def test_common_hamiltonian_examples():
    L1, L2 = V("D1 /\\ D2", C3), V("D1 /\\ D3", C3)
    assert common_hamiltonian_check(V("D1", C3), L1, L2)
    assert not common_hamiltonian_check(V("D2", C3), L1, L2)
    assert not common_hamiltonian_check(V("x1 * D1", C3), L1, L2)


def test_reduce_examples():
    theta = reduce(V("x3 * D1 /\\ D2 /\\ D3", C3), 2)
    sub = Context(1, ("x3",))
    assert theta.ctx == sub and theta == MultiVector.basis(sub, 1) * sub.var(1)
    with pytest.raises(ReductionError, match="lacks index 2"):
        reduce(V("D1 /\\ D3", C3), 2)
    assert reduce(V("D1 /\\ D2", C3), 2) == 1
    with pytest.raises(ReductionError):
        reduce(V("x1 * D1 /\\ D2", C3), 1)


def test_reduce_round_trip():
    rng = random.Random(8)
    for _ in range(30):
        n = rng.randint(2, 5)
        ctx = Context(n)
        k = rng.randint(1, n - 1)
        rest = tuple(range(k + 1, n + 1))
        theta_deg = rng.randint(0, len(rest))
        tail = tuple(sorted(rng.sample(rest, theta_deg)))
        coef = rand_poly(rng, ctx, skip_vars=frozenset(range(1, k + 1)), allow_zero=False)
        L = MultiVector.basis(ctx, *range(1, k + 1), *tail) * coef
        theta = reduce(L, k)
        # lift Theta back by shifting blades and re-embedding coefficients
        lifted = {tuple(i + k for i in b): c.substitute(ctx.gens()[k:]) for b, c in theta.terms()}
        assert wedge(canonical_blade(ctx, range(1, k + 1)), MultiVector(ctx, theta.degree, lifted)) == L


@pytest.mark.parametrize(
    "second, expected",
    [("D1 /\\ D3", True), ("D1 /\\ D3 + x2 * D1 /\\ D2", False), ("D1 /\\ D3 + x3 * D1 /\\ D2", True)],
)
def test_commute_high_examples(second, expected):
    witness = HighWitness([WitnessStep(V("D1", C3))])
    assert commute_high(V("D1 /\\ D2", C3), V(second, C3), witness) is expected


def test_commute_high_on_canonical_displays():
    for n in range(2, 6):
        ctx = Context(n)
        for q1, q2 in itertools.product(range(1, n + 1), repeat=2):
            k = q1 + q2 - n
            if k < 1:
                continue
            L1 = canonical_blade(ctx, range(1, q1 + 1))
            L2 = canonical_blade(ctx, tuple(range(1, k + 1)) + tuple(range(q1 + 1, n + 1)))
            steps = [WitnessStep(MultiVector.basis(Context(n - j, ctx.var_names[j:]), 1)) for j in range(k)]
            assert commute_high(L1, L2, HighWitness(steps))


def test_commute_high_witness_errors():
    L1, L2 = V("D1 /\\ D2", C3), V("D1 /\\ D3", C3)
    with pytest.raises(WitnessError):
        commute_high(L1, L2, HighWitness([]))
    x1, x2, x3 = C3.gens()
    bent = CoordinateMap.shear(C3, 2, x1**2)
    with pytest.raises(WitnessError):
        commute_high(L1, L2, HighWitness([WitnessStep(V("D1", C3), bent)]))
    with pytest.raises(RegimeError):
        commute_high(V("D1", C3), V("D2", C3), HighWitness([]))


def test_commute_degenerate_examples():
    ident4, ident3 = CoordinateMap.identity(C4), CoordinateMap.identity(C3)
    pts4 = [(1, 2, 3, 4), (0, -1, Fraction(1, 2), 7)]
    assert commute_degenerate(V("D1 /\\ D2", C4), V("D1 /\\ D3", C4), 1, ident4, pts4)
    assert not commute_degenerate(V("D1 /\\ D2", C3), V("D1 /\\ D2", C3), 1, ident3, [(1, 2, 3)])
    assert not commute_degenerate(
        V("D1 /\\ D2", C3), V("D1 /\\ D2 + x3 * D1 /\\ D3", C3), 2, ident3, [(1, 2, 3)]
    )
    with pytest.raises(PreconditionError):
        commute_degenerate(V("D1 /\\ D2", C4), V("x4 * D1 /\\ D3", C4), 1, ident4, [(1, 2, 3, 0)])


def test_commute_degenerate_under_shear():
    phi = CoordinateMap.shear(C4, 4, F("x1 * x2", C4))
    L1, L2 = V("D1 /\\ D2", C4), V("D1 /\\ D3", C4)
    pushed = pushforward(phi, L1), pushforward(phi, L2)
    assert commute_degenerate(*pushed, 1, phi.inverted(), [(1, 1, 1, 1), (2, -1, 0, 3)])


def _aff_action(sign=-1):
    return LieAction([V("x3 * D3 + D4", C4), V("D3", C4)], {(1, 2): {2: sign}})


def test_lie_action_examples():
    abelian = LieAction([V("D1", C4), V("D2", C4)])
    first = lie_action_nambu(abelian, {(1, 2): 1})
    second = lie_action_nambu(_aff_action(), {(1, 2): 1})
    assert first == V("D1 /\\ D2", C4)
    assert second == V("-1 * D3 /\\ D4", C4)
    assert commute_low(first, second)
    assert actions_commute(abelian, _aff_action())


def test_lie_action_validation():
    with pytest.raises(LieActionError):
        _aff_action(sign=1)
    with pytest.raises(LieActionError):
        LieAction([V("D1", C2), V("D2", C2)], {(1, 2): {1: 1}, (2, 1): {1: 1}})
    with pytest.raises(LieActionError):
        lie_action_nambu(_aff_action(), {(1, 3): 1})


def test_lie_action_nambu_is_alternating_and_linear():
    action = _aff_action()
    xi = lie_action_nambu(action, {(1, 2): 1})
    assert lie_action_nambu(action, {(2, 1): 1}) == -xi
    assert lie_action_nambu(action, {(1, 2): 3, (2, 1): 1}) == xi * 2
    assert not lie_action_nambu(action, {(1, 1): 5})


def test_integrable_presentation_examples():
    L1, L2 = V("D1 /\\ D2", C4), V("D3", C4)
    assert is_integrable_presentation([L1, L2], [F("x4", C4)])
    assert not is_integrable_presentation([L1, L2], [F("x3", C4)])
    assert not is_integrable_presentation([L1, L2], [])
    assert is_integrable_presentation([L2, L1], [F("x4", C4)])
    with pytest.raises(ValueError):
        is_integrable_presentation([], [])


def test_prop35_converse_generator():
    rng = random.Random(21)
    for _ in range(20):
        ctx = Context(rng.randint(3, 5))
        skip = frozenset({1})
        pi1 = rand_multivector(rng, ctx, 1, skip_vars=skip)
        pi2 = rand_multivector(rng, ctx, rng.randint(1, 2), skip_vars=skip)
        L1, L2 = wedge(V("D1", ctx), pi1), wedge(V("D1", ctx), pi2)
        assert common_hamiltonian_check(V("D1", ctx), L1, L2)


def test_commute_low_invariant_under_pushforward():
    rng = random.Random(13)
    for _ in range(15):
        phi = rand_shear(rng, C4)
        for a, b in [("D1 /\\ D2", "D3 /\\ D4"), ("D1", "x1 * D2")]:
            before = commute_low(V(a, C4), V(b, C4))
            assert commute_low(pushforward(phi, V(a, C4)), pushforward(phi, V(b, C4))) == before
