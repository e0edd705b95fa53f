from fractions import Fraction
from functools import reduce

import pytest
from hypothesis import given, strategies as st

from milnorwitt import fields as fl
from milnorwitt.errors import NotIrreducible, UnsupportedField, ZeroElement
from milnorwitt.fields import FieldDesc, Place

Q = FieldDesc.rationals()
F7 = FieldDesc.prime(7)
F3t = FieldDesc.ratfun(3)


def brute_squares(p):
    return {x * x % p for x in range(1, p)}


def brute_hilbert_odd(a, b, p):
    """(a, b)_p for p-adic units or uniformizers via solvability of z^2 = a x^2 + b y^2 mod p^3.

    After (a, b) = (a, -ab) at most one entry is divisible by p; a primitive
    solution mod p^3 with a unit partial derivative then lifts.
    """
    a, b = fl.squarefree_part(a), fl.squarefree_part(b)
    if a % p == 0 and b % p == 0:
        b = fl.squarefree_part(-a * b // (p * p))  # (a, b) = (a, -ab)
    m = p ** 3
    for x in range(m):
        for y in range(m):
            rhs = (a * x * x + b * y * y) % m
            for z in range(m):
                if (z * z - rhs) % m:
                    continue
                if all(c % p == 0 for c in (x, y, z)):
                    continue
                # Hensel on z if p does not divide 2z, else on x or y
                if z % p or (a * x) % p or (b * y) % p:
                    return 1
    return -1


# --- fields and elements ------------------------------------------------------

def test_field_construction_rejects_bad_characteristic():
    with pytest.raises(UnsupportedField):
        FieldDesc.prime(2)
    with pytest.raises(UnsupportedField):
        FieldDesc.prime(9)
    with pytest.raises(NotIrreducible):
        FieldDesc.extension(3, (2, 0, 1))  # t^2 + 2 = (t+1)(t+2)


def test_element_is_unit_iff_nonzero():
    for x in F7.elements():
        assert x.is_unit() == (not x.is_zero())


def test_ratfun_canonical_form():
    x = F3t.ratfun_elem((0, 2), (0, 0, 2))  # 2t / 2t^2 = 1/t
    assert x == F3t.ratfun_elem((1,), (0, 1))
    assert x.value[1][-1] == 1


# --- square classes -----------------------------------------------------------

def test_square_class_examples():
    assert fl.square_class(Q(12)).rep == Q(3)
    assert fl.square_class(F7(1)).rep == F7(1)
    assert fl.square_class(F7(5)).rep == F7(3)
    assert brute_squares(7) == {1, 2, 4}


def test_square_class_of_zero():
    with pytest.raises(ZeroElement):
        fl.square_class(Q(0))


def test_is_square_examples():
    assert fl.is_square(F7(2))
    assert not fl.is_square(F7(-1))
    assert fl.is_square(Q(Fraction(9, 4)))


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_is_square_matches_brute_force(p):
    F = FieldDesc.prime(p)
    sq = brute_squares(p)
    for x in range(1, p):
        assert fl.is_square(F(x)) == (x in sq)


def test_extension_field_squares_index_two():
    F9 = FieldDesc.extension(3, (1, 0, 1))
    units = list(F9.units())
    squares = {u * u for u in units}
    assert len(squares) == 4
    assert all(fl.is_square(u) == (u in squares) for u in units)


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30).filter(lambda x: x != 0)


@given(rationals, rationals)
def test_square_class_constant_on_cosets_over_q(x, y):
    assert fl.square_class(Q(x * y * y)).rep == fl.square_class(Q(x)).rep


@given(st.integers(1, 6), st.integers(1, 6))
def test_square_class_constant_on_cosets_over_f7(x, y):
    assert fl.square_class(F7(x * y * y)).rep == fl.square_class(F7(x)).rep


@given(rationals)
def test_square_class_idempotent(x):
    r = fl.square_class(Q(x)).rep
    assert fl.square_class(r).rep == r


def _ratfun_elems():
    poly = st.lists(st.integers(0, 2), min_size=1, max_size=4).map(lambda c: tuple(c) + (1,))
    return st.tuples(st.integers(1, 2), poly, poly).map(lambda t: F3t.ratfun_elem(tuple(t[0] * c for c in t[1]), t[2]))


@given(_ratfun_elems(), _ratfun_elems())
def test_square_class_constant_on_cosets_over_ratfun(x, y):
    assert fl.square_class(x * y * y).rep == fl.square_class(x).rep


# --- Legendre, factor ---------------------------------------------------------

def test_legendre_examples():
    assert fl.legendre(2, 7) == 1
    assert fl.legendre(3, 7) == -1
    for p in (3, 5, 7, 11):
        assert fl.legendre(1, p) == 1


@given(st.sampled_from([3, 5, 7, 11, 13, 17]), st.integers(1, 500), st.integers(1, 500))
def test_legendre_multiplicative(p, a, b):
    if a % p == 0 or b % p == 0:
        return
    assert fl.legendre(a, p) * fl.legendre(b, p) == fl.legendre(a * b, p)
    assert (fl.legendre(a, p) == 1) == (a % p in brute_squares(p))


def test_factor_examples():
    assert fl.factor_int(12) == (1, {2: 2, 3: 1})
    assert fl.factor_int(-1) == (-1, {})
    unit, fac = fl.factor(F3t((1, 0, 1)))
    assert fac == {(1, 0, 1): 1} and unit == F3t(1)
    assert all((x * x + 1) % 3 for x in range(3))


@given(st.integers(-10**6, 10**6).filter(lambda n: n != 0))
def test_factor_round_trip(n):
    unit, fac = fl.factor_int(n)
    assert unit * reduce(lambda a, b: a * b, (p ** e for p, e in fac.items()), 1) == n


# --- valuations and places ----------------------------------------------------

def test_valuation_and_reduction():
    assert fl.valuation(Q(Fraction(49, 3)), Place.prime(7)) == 2
    assert fl.valuation(F3t.ratfun_elem((1,), (0, 0, 1)), Place.irreducible(3, (0, 1))) == -2
    assert fl.valuation(F3t((0, 0, 1)), Place.infinity(3)) == -2
    assert fl.reduce_unit(Q(Fraction(3, 2)), Place.prime(7)) == F7(5)


# --- Hilbert symbols ----------------------------------------------------------

def test_hilbert_examples():
    for b in (2, 3, -5, Fraction(7, 3)):
        for v in (Place.real(), Place.two(), Place.prime(3), Place.prime(7)):
            assert fl.hilbert_symbol(Q(1), Q(b), v) == 1
    assert fl.hilbert_symbol(Q(-1), Q(-1), Place.real()) == -1
    assert fl.hilbert_symbol(Q(5), Q(7), Place.prime(7)) == -1


@pytest.mark.parametrize("a,b", [(5, 7), (3, 7), (7, 7), (3, 5), (14, 21), (-1, 7), (2, 3)])
def test_hilbert_matches_brute_force(a, b):
    for p in (3, 5, 7):
        assert fl.hilbert_symbol(Q(a), Q(b), Place.prime(p)) == brute_hilbert_odd(a, b, p)


small_primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


@st.composite
def supported_rationals(draw):
    x = Fraction(draw(st.sampled_from([1, -1])))
    for p in draw(st.lists(st.sampled_from(small_primes), max_size=4)):
        x *= Fraction(p) ** draw(st.integers(-2, 2))
    return x


@given(supported_rationals(), supported_rationals())
def test_hilbert_product_formula(a, b):
    places = {2} | set(fl.factor(a)[1]) | set(fl.factor(b)[1])
    prod = fl.hilbert_symbol(Q(a), Q(b), Place.real())
    for p in places:
        prod *= fl.hilbert_symbol(Q(a), Q(b), Place.prime(p))
    assert prod == 1
