import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from milnorwitt import quadform as qf
from milnorwitt import symbolic as sy
from milnorwitt.acceptance import random_ratfun
from milnorwitt.errors import ParseError
from milnorwitt.fields import FieldDesc
from milnorwitt.parsing import (format_element, parse_element, parse_field, parse_form, parse_place,
                                parse_symbol)
from milnorwitt.quadform import QuadForm

Q = FieldDesc.rationals()
F3t = FieldDesc.ratfun(3)
F9 = FieldDesc.extension(3, (1, 0, 1))


@pytest.mark.parametrize("tag", ["QQ", "GF(7)", "GF(3)(t)", "GF(9;x^2+1)"])
def test_field_round_trip(tag):
    F = parse_field(tag)
    assert F.tag == tag and parse_field(F.tag) == F


def test_field_errors():
    with pytest.raises(ParseError):
        parse_field("GF(4)")
    with pytest.raises(ParseError):
        parse_field("ZZ")


def test_element_examples():
    assert parse_element("-9/4@QQ") == Q(Fraction(-9, 4))
    assert parse_element("2^3-1@GF(5)") == FieldDesc.prime(5)(2)
    t = parse_element("t@GF(3)(t)")
    assert parse_element("(t^2+1)/t@GF(3)(t)") == (t * t + 1) / t
    x = parse_element("x@GF(9;x^2+1)")
    assert x * x == F9(-1)


@settings(max_examples=80)
@given(st.fractions(max_denominator=10**6).filter(bool))
def test_rational_round_trip(x):
    e = Q(x)
    assert parse_element(format_element(e)) == e


@settings(max_examples=60)
@given(st.integers(0, 10**6))
def test_ratfun_round_trip(seed):
    e = random_ratfun(random.Random(seed), F3t)
    assert parse_element(format_element(e)) == e


def test_extension_round_trip():
    for e in F9.elements():
        assert parse_element(format_element(e)) == e


@settings(max_examples=40)
@given(st.lists(st.integers(-50, 50).filter(bool), min_size=1, max_size=5))
def test_form_round_trip(entries):
    q = QuadForm(Q, tuple(entries))
    assert parse_form(q.tag()) == q


def test_pfister_and_gram():
    p = parse_form("pfister(2,3)@QQ")
    assert isinstance(p, qf.PfisterForm) and p.expand().rank == 4
    g = parse_form("[[0,1],[1,0]]@QQ")
    assert isinstance(g, qf.GramMatrix)
    assert parse_form("gram([[0,1],[1,0]])@QQ") == g


@pytest.mark.parametrize("text", ["7@QQ", "real@QQ", "2@QQ", "poly(t^2+1)@GF(3)(t)", "inf@GF(3)(t)"])
def test_place_round_trip(text):
    v = parse_place(text)
    assert v.tag == text and parse_place(v.tag) == v


def test_place_rejects_composites():
    with pytest.raises(ParseError):
        parse_place("9@QQ")
    with pytest.raises(ParseError):
        parse_place("poly(t^2+2)@GF(3)(t)")


@pytest.mark.parametrize("text,theory", [
    ("eta^2*{3,5}@GF(7)", "MWK"),
    ("{3}+{5}-2*eta*{3,5}@GF(7)", "MWK"),
    ("[3]*[5]@GF(7)", "WK"),
    ("l(3)*l(5)@GF(7)", "KM"),
    ("{t,2}@GF(3)(t)", "MWK"),
])
def test_symbol_round_trip(text, theory):
    e = parse_symbol(text)
    assert e.theory == theory
    assert parse_symbol(e.tag(), theory) == e


def test_symbol_products_concatenate():
    assert parse_symbol("{3}*{5}@GF(7)") == sy.sym("MWK", FieldDesc.prime(7), 3, 5)
    assert parse_symbol("eta@GF(7)", "WK") == sy.eta("WK", FieldDesc.prime(7))


def test_symbol_errors():
    with pytest.raises(ParseError):
        parse_symbol("{3}+l(5)@GF(7)")
    with pytest.raises(ParseError):
        parse_symbol("eta*l(3)@GF(7)")


@pytest.mark.parametrize("text,pos", [
    ("diag(1,,2)@QQ", 7),
    ("diag(1,2@QQ", 8),
    ("diag(1,2)@QX", 10),
    ("{3,5}@GF(7", 10),
    ("foo(1)@QQ", 0),
])
def test_error_positions(text, pos):
    with pytest.raises(ParseError) as exc:
        parse_form(text) if "{" not in text else parse_symbol(text)
    assert exc.value.position == pos
    assert exc.value.text == text


def test_error_lists_expected_tokens():
    with pytest.raises(ParseError) as exc:
        parse_form("foo(1)@QQ")
    assert "diag(" in exc.value.expected


def test_division_by_zero_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_element("1/0@QQ")
