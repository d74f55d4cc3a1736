import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nambu import Context, Form, MultiVector, Polynomial
from nambu.textio import ParseError, from_json, parse, parse_list, serialize

from strategies import contexts, forms, multivectors, polynomials

C2, C3 = Context(2), Context(3)


def test_parse_examples():
    value = parse("x1^2 * D1 /\\ D2 + 3 * D2 /\\ D3", C3, "multivector")
    x1 = C3.var(1)
    assert value == MultiVector.basis(C3, 1, 2) * x1**2 + MultiVector.basis(C3, 2, 3) * 3
    assert parse("D2 /\\ D1", C2) == MultiVector.basis(C2, 1, 2, coef=-1)


def test_kind_inference():
    assert isinstance(parse("x1 + 1", C2), Polynomial)
    assert isinstance(parse("x1 * D1", C2), MultiVector)
    assert isinstance(parse("dx1 /\\ dx2", C2), Form)
    assert isinstance(parse("x1", C2, "multivector"), MultiVector)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("-(x1 + x2)^2 * D1", "(-x1^2 - 2 * x1 * x2 - x2^2) * D1"),
        ("1/2 * x1 * x2 * 4", "2 * x1 * x2"),
        ("  D1/\\D2  ", "D1 /\\ D2"),
        ("x2 * D2 - x1 * D1", "-x1 * D1 + x2 * D2"),
        ("D1 - D1", "0"),
    ],
)
def test_canonical_text(text, expected):
    assert serialize(parse(text, C2)) == expected


def test_serialize_examples():
    assert serialize(MultiVector.basis(C3, 1, 2)) == "D1 /\\ D2"
    value = MultiVector.basis(C3, 1, 2, coef=-1) + MultiVector.basis(C3, 1, 3) * C3.var(1) ** 2
    assert serialize(value) == "-1 * D1 /\\ D2 + x1^2 * D1 /\\ D3"


@pytest.mark.parametrize(
    "text, kind, span",
    [
        ("D1 + D1 /\\ D2", "degree-mismatch", (5, 13)),
        ("x0 + 1", "unknown-variable", (0, 2)),
        ("x4", "unknown-variable", (0, 2)),
        ("y * D1", "unknown-variable", (0, 1)),
        ("D3", "index-range", (0, 2)),
        ("x1 $ 2", "lex", (3, 4)),
        ("x1 +", "syntax", (4, 4)),
        ("D1 + dx2", "syntax", None),
        ("x1^0", "syntax", None),
        ("D1 /\\ D1", None, None),
    ],
)
def test_parse_errors(text, kind, span):
    if kind is None:
        assert not parse(text, C2)
        return
    with pytest.raises(ParseError) as err:
        parse(text, C2)
    assert err.value.kind == kind
    if span is not None:
        assert (err.value.span.begin, err.value.span.end) == span
    assert 0 <= err.value.span.begin <= err.value.span.end <= len(text)


def test_parse_list_offsets():
    assert parse_list("x1, x2 + 1", C2, "poly") == [C2.var(1), C2.var(2) + 1]
    with pytest.raises(ParseError) as err:
        parse_list("x1, x9", C2, "poly")
    assert err.value.span.begin == 4


def test_json_schema():
    value = MultiVector.basis(C2, 1, 2) * (C2.var(1) / 2)
    obj = json.loads(serialize(value, "json"))
    assert obj == {
        "n": 2,
        "vars": ["x1", "x2"],
        "kind": "multivector",
        "degree": 2,
        "terms": [{"blade": [1, 2], "poly": [{"coef": "1/2", "exp": [1, 0]}]}],
    }


def test_json_rejects_garbage():
    with pytest.raises(ParseError):
        from_json("{not json")
    with pytest.raises(ParseError):
        from_json('{"n": 2, "vars": ["x1", "x2"], "kind": "spinor", "degree": 0, "terms": []}')


def _values(data):
    ctx = data.draw(contexts(1, 4))
    kind = data.draw(st.sampled_from(["poly", "multivector", "form"]))
    if kind == "poly":
        return data.draw(polynomials(ctx))
    if kind == "multivector":
        return data.draw(multivectors(ctx))
    return data.draw(forms(ctx))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_round_trips(data):
    value = _values(data)
    kind = {Polynomial: "poly", MultiVector: "multivector", Form: "form"}[type(value)]
    text = serialize(value)
    back = parse(text, value.ctx, kind)
    assert back == value and serialize(back) == text
    blob = serialize(value, "json")
    again = from_json(blob)
    assert again == value and serialize(again, "json") == blob


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_equal_values_serialize_identically(data):
    ctx = data.draw(contexts(1, 3))
    a, b = data.draw(polynomials(ctx)), data.draw(polynomials(ctx))
    assert serialize(a + b) == serialize(b + a)
    assert serialize(a * b, "json") == serialize(b * a, "json")
