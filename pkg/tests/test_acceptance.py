"""Acceptance gate: twelve criteria, exact arithmetic throughout.

Every test here is one criterion; ``conftest.py`` prints a PASS/FAIL line per
criterion at the end of the run.  Run standalone with
``python tests/test_acceptance.py``.
"""

import random
import subprocess
import sys

import pytest

from nambu import (
    Context,
    CoordinateMap,
    Form,
    HighWitness,
    LieAction,
    MultiVector,
    WitnessStep,
    associated_nambu,
    canonical_blade,
    common_hamiltonian_check,
    commute_high,
    commute_low,
    divides,
    exterior_derivative,
    interior,
    inverse_dual,
    is_cit,
    is_integrable_presentation,
    is_nambu,
    lie_action_nambu,
    lie_derivative,
    mu_contains,
    pushforward,
    reduce,
    schouten,
    singular_locus,
    verify_normal_form,
    volume_dual,
    wedge,
    wedge_all,
)
from nambu.cli import main
from nambu.errors import LieActionError
from nambu.textio import from_json, parse, serialize

from golden import GOLDEN
from oracles import decomposable_bracket, graded_to_sympy, vector_components
from strategies import rand_context, rand_form, rand_multivector, rand_nambu, rand_poly, rand_shear

pytestmark = pytest.mark.acceptance


def V(text, ctx):
    return parse(text, ctx, "multivector")


def P(text, ctx):
    return parse(text, ctx, "poly")


def sign(a, b):
    return -1 if (a * b) % 2 else 1


def test_criterion_01_schouten_axioms():
    """Schouten axiom suite on 300 random pairs and triples."""
    rng = random.Random(101)
    nontrivial = 0
    for _ in range(300):
        ctx = rand_context(rng, 2, 5)
        while True:
            # keep the double bracket below the top degree so it can be nonzero
            p, q, r = (rng.randint(1, min(3, ctx.n)) for _ in range(3))
            if p + q + r - 2 <= ctx.n:
                break
        A = rand_multivector(rng, ctx, p, max_terms=4)
        B = rand_multivector(rng, ctx, q, max_terms=4)
        C = rand_multivector(rng, ctx, r, max_terms=4)
        assert schouten(A, B) == schouten(B, A) * -sign(p - 1, q - 1)
        lhs = schouten(A, schouten(B, C))
        assert lhs == schouten(schouten(A, B), C) + schouten(B, schouten(A, C)) * sign(p - 1, q - 1)
        nontrivial += bool(lhs)
        assert schouten(A, wedge(B, C)) == wedge(schouten(A, B), C) + wedge(B, schouten(A, C)) * sign(p - 1, q)
        X, f = rand_multivector(rng, ctx, 1), rand_poly(rng, ctx)
        assert schouten(X, MultiVector.scalar(f)) == X.apply(f)
    # guard against a generator that only produces vanishing brackets
    assert nontrivial >= 100


def test_criterion_02_double_sum_oracle():
    """Bracket equals the independent double-sum expansion on 100 decomposable pairs."""
    rng = random.Random(202)
    for _ in range(100):
        ctx = rand_context(rng, 2, 4)
        p, q = rng.randint(1, ctx.n), rng.randint(1, ctx.n)
        Xs = [rand_multivector(rng, ctx, 1, max_terms=2, max_degree=2) for _ in range(p)]
        Ys = [rand_multivector(rng, ctx, 1, max_terms=2, max_degree=2) for _ in range(q)]
        ours = graded_to_sympy(schouten(wedge_all(Xs), wedge_all(Ys)))
        oracle = decomposable_bracket([vector_components(X) for X in Xs], [vector_components(Y) for Y in Ys], ctx.n)
        assert ours == oracle


def test_criterion_03_duality():
    """Dual round trip and the Lie derivative of a contracted volume, 100 cases each."""
    rng = random.Random(303)
    for _ in range(100):
        ctx = rand_context(rng, 1, 5)
        L = rand_multivector(rng, ctx, rng.randint(0, ctx.n))
        assert inverse_dual(volume_dual(L)) == L
    for _ in range(100):
        ctx = rand_context(rng, 1, 4)
        X = rand_multivector(rng, ctx, 1)
        L = rand_multivector(rng, ctx, rng.randint(0, ctx.n))
        omega = Form.volume(ctx)
        lhs = lie_derivative(X, interior(L, omega))
        rhs = interior(lie_derivative(X, L), omega) + interior(L, lie_derivative(X, omega))
        assert lhs == rhs
        assert lie_derivative(X, omega) == exterior_derivative(interior(X, omega))


def test_criterion_04_example_x_dx_dy():
    """The structure x d/dx ^ d/dy in the plane."""
    ctx = Context(2, ("x", "y"))
    L = V("x1 * D1 /\\ D2", ctx)
    assert is_cit(V("x1 * D1", ctx), L) == 0
    assert is_cit(V("D2", ctx), L) == 0
    assert is_cit(V("D1", ctx), L) is None
    loc = singular_locus(L)
    assert loc.gcd == P("x1", ctx) and loc.codim_one
    out = associated_nambu(L, [(P("x1", ctx), 1)])
    unit = divides(L.coefficient((1, 2)), out.coefficient((1, 2)))
    assert [b for b, _ in out.terms()] == [(1, 2)] and unit is not None and unit.is_constant()


def test_criterion_05_mu_table():
    """Conformal preservation verdicts and associated structures."""
    ctx = Context(2)
    assert mu_contains(P("x1", ctx), V("D2", ctx)).member
    assert not mu_contains(P("x1", ctx), V("D1 /\\ D2", ctx)).member
    assert mu_contains(P("x1^2 + x2^2", ctx), V("x1 * D2 - x2 * D1", ctx)).member
    assert associated_nambu(V("x1 * D2", ctx), [(P("x1", ctx), 1)]) == V("D2", ctx)
    assert associated_nambu(
        V("x1^2 * x2 * D1 /\\ D2", ctx), [(P("x1", ctx), 2), (P("x2", ctx), 1)]
    ) == V("x1 * x2 * D1 /\\ D2", ctx)


def test_criterion_06_nambu_recognition():
    """200 random normal-form structures accepted; Plucker and Frobenius failures rejected."""
    rng = random.Random(606)
    for _ in range(200):
        ctx = rand_context(rng, 1, 5)
        assert is_nambu(rand_nambu(rng, ctx, rng.randint(1, ctx.n)))
    assert not is_nambu(V("D1 /\\ D2 + D3 /\\ D4", Context(4)))
    assert not is_nambu(V("D1 /\\ D2 + x1 * D1 /\\ D3", Context(3)))


def test_criterion_07_normal_form_under_shears():
    """50 random shears of the canonical pair."""
    rng = random.Random(707)
    done = 0
    while done < 50:
        ctx = rand_context(rng, 2, 5)
        q1 = rng.randint(1, ctx.n - 1)
        q2 = rng.randint(1, ctx.n - q1)
        L1 = canonical_blade(ctx, range(1, q1 + 1))
        L2 = canonical_blade(ctx, range(q1 + 1, q1 + q2 + 1))
        phi = rand_shear(rng, ctx)
        A, B = pushforward(phi, L1), pushforward(phi, L2)
        if A == L1 and B == L2:
            continue  # the shear fixes the pair, so no wrong map exists to test
        assert commute_low(A, B)
        assert verify_normal_form(A, B, phi.inverted())
        assert not verify_normal_form(A, B, CoordinateMap.identity(ctx))
        done += 1


def test_criterion_08_common_hamiltonian_converse():
    """50 random pairs D1 ^ Pi1, D1 ^ Pi2 with Pi independent of x1."""
    rng = random.Random(808)
    for _ in range(50):
        ctx = rand_context(rng, 2, 5)
        skip = frozenset({1})
        D1 = MultiVector.basis(ctx, 1)
        pi1 = rand_multivector(rng, ctx, rng.randint(1, ctx.n - 1), skip_vars=skip)
        pi2 = rand_multivector(rng, ctx, rng.randint(1, ctx.n - 1), skip_vars=skip)
        L1, L2 = wedge(D1, pi1), wedge(D1, pi2)
        assert not schouten(L1, L2)
        assert common_hamiltonian_check(D1, L1, L2)


def test_criterion_09_reduction_and_high_regime():
    """50 reduction round trips and the two high-regime verdicts."""
    rng = random.Random(909)
    for _ in range(50):
        ctx = rand_context(rng, 2, 5)
        k = rng.randint(1, ctx.n - 1)
        rest = list(range(k + 1, ctx.n + 1))
        tail = sorted(rng.sample(rest, rng.randint(0, len(rest))))
        Pi = canonical_blade(ctx, range(1, k + 1))
        L = wedge(Pi, MultiVector.basis(ctx, *tail)) * rand_poly(
            rng, ctx, skip_vars=frozenset(range(1, k + 1)), allow_zero=False
        )
        theta = reduce(L, k)
        lifted = {tuple(i + k for i in b): c.substitute(ctx.gens()[k:]) for b, c in theta.terms()}
        assert wedge(Pi, MultiVector(ctx, theta.degree, lifted)) == L
    ctx = Context(3)
    witness = HighWitness([WitnessStep(V("D1", ctx))])
    assert commute_high(V("D1 /\\ D2", ctx), V("D1 /\\ D3", ctx), witness)
    assert not commute_high(V("D1 /\\ D2", ctx), V("D1 /\\ D3 + x2 * D1 /\\ D2", ctx), witness)


def test_criterion_10_lie_actions():
    """Abelian times affine action on four coordinates."""
    ctx = Context(4)
    abelian = LieAction([V("D1", ctx), V("D2", ctx)])
    affine = LieAction([V("x3 * D3 + D4", ctx), V("D3", ctx)], {(1, 2): {2: -1}})
    first = lie_action_nambu(abelian, {(1, 2): 1})
    second = lie_action_nambu(affine, {(1, 2): 1})
    assert first == V("D1 /\\ D2", ctx)
    assert second == V("-1 * D3 /\\ D4", ctx)
    assert commute_low(first, second)
    with pytest.raises(LieActionError):
        LieAction([V("x3 * D3 + D4", ctx), V("D3", ctx)], {(1, 2): {2: 1}})


def test_criterion_11_integrable_presentations():
    """Dimension count, first integrals and commutativity together."""
    ctx = Context(4)
    Ls = [V("D1 /\\ D2", ctx), V("D3", ctx)]
    assert is_integrable_presentation(Ls, [P("x4", ctx)]) is True
    assert is_integrable_presentation(Ls, [P("x3", ctx)]) is False
    assert is_integrable_presentation(Ls, []) is False


def test_criterion_12_cli_golden_and_round_trip(capsys):
    """Ten golden invocations and 100 bit-exact round trips."""
    assert len(GOLDEN) == 10
    for argv, stdout, code in GOLDEN:
        assert main(list(argv)) == code
        assert capsys.readouterr().out == stdout
    rng = random.Random(1212)
    for i in range(100):
        ctx = rand_context(rng, 1, 5)
        kind = ("poly", "multivector", "form")[i % 3]
        if kind == "poly":
            value = rand_poly(rng, ctx)
        elif kind == "multivector":
            value = rand_multivector(rng, ctx, rng.randint(0, ctx.n))
        else:
            value = rand_form(rng, ctx, rng.randint(0, ctx.n))
        text = serialize(value)
        assert serialize(parse(text, ctx, kind)) == text
        assert parse(text, ctx, kind) == value
        blob = serialize(value, "json")
        assert serialize(from_json(blob), "json").encode() == blob.encode()


if __name__ == "__main__":
    # fresh interpreter, so pytest sees hypothesis before it is imported
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-q"]))
